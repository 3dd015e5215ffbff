import numpy as np
import pytest
from fractions import Fraction

from pstnet.fock import BasisSpec, enumerate_basis, partition_two_excitation
from pstnet.targets import (
    TargetTransform,
    cycle_decomposition,
    cycle_spectrum,
    mirror_permutation,
    parity_permutation,
)


def block_pairs(sites=5):
    spec = BasisSpec(sites=sites, excitations=2, labels=("mu", "nu"),
                     double_occupancy="forbidden", content=("mu", "nu"))
    basis = enumerate_basis(spec)
    block = list(partition_two_excitation(basis).less)
    pairs = [tuple(site for site, _ in basis.state_of(i).canonical_pair)
             for i in block]
    return basis, block, pairs


def test_mirror_examples():
    basis, block, pairs = block_pairs()
    mirror = mirror_permutation(5, pairs)
    pos = {pair: k for k, pair in enumerate(pairs)}
    assert mirror.mapping[pos[(1, 2)]] == pos[(4, 5)]
    assert mirror.mapping[pos[(1, 5)]] == pos[(1, 5)]
    assert mirror.mapping[pos[(2, 4)]] == pos[(2, 4)]


def test_mirror_is_involution():
    _, _, pairs = block_pairs()
    mirror = mirror_permutation(5, pairs)
    mat = mirror.matrix()
    assert np.allclose(mat @ mat, np.eye(10))
    cycles = cycle_decomposition(mirror)
    lengths = sorted(c.length for c in cycles)
    assert lengths == [1, 1, 2, 2, 2, 2]


def test_parity_permutation_support_and_targets():
    spec = BasisSpec(sites=5, excitations=2, labels=("mu", "nu"),
                     double_occupancy="forbidden", content=("mu", "nu"))
    basis = enumerate_basis(spec)
    parity = parity_permutation(basis)
    part = partition_two_excitation(basis)
    support = set(parity.mapping)
    less_support = support & set(part.less)
    assert len(support) == 12
    assert len(less_support) == 6
    covered_pairs = sorted(
        tuple(site for site, _ in basis.state_of(i).canonical_pair)
        for i in less_support)
    assert covered_pairs == [(1, 2), (1, 4), (2, 3), (2, 5), (3, 4), (4, 5)]
    # labels ride with their excitation through the inversion
    src = basis.index_of(((1, "mu"), (2, "nu")))
    dst = basis.index_of(((4, "nu"), (5, "mu")))
    assert parity.mapping[src] == dst
    src = basis.index_of(((2, "mu"), (3, "nu")))
    dst = basis.index_of(((3, "nu"), (4, "mu")))
    assert parity.mapping[src] == dst
    # involution, one entry per row/column
    mat = parity.matrix()
    assert np.allclose(mat @ mat, np.eye(basis.dim))
    sub = mat[np.ix_(sorted(support), sorted(support))]
    assert np.array_equal(np.sort(np.unique(sub)), [0.0, 1.0])
    assert np.allclose(sub.sum(axis=0), 1.0)
    assert np.allclose(sub.sum(axis=1), 1.0)


def test_cycle_decomposition_trivial_cases():
    identity = TargetTransform.permutation(4, {i: i for i in range(4)})
    cycles = cycle_decomposition(identity)
    assert [c.length for c in cycles] == [1, 1, 1, 1]

    swap = TargetTransform.permutation(2, {0: 1, 1: 0})
    (cycle,) = cycle_decomposition(swap)
    assert cycle.members == (0, 1)
    assert cycle.length == 2


def test_cycle_decomposition_covers_support():
    rng = np.random.default_rng(23)
    for _ in range(25):
        dim = int(rng.integers(2, 14))
        perm = rng.permutation(dim)
        target = TargetTransform.permutation(dim, {i: int(perm[i]) for i in range(dim)})
        cycles = cycle_decomposition(target)
        members = sorted(m for c in cycles for m in c.members)
        assert members == list(range(dim))
        assert sum(c.length for c in cycles) == dim
        for c in cycles:
            assert c.members == tuple(sorted(c.members))
            for pos, idx in enumerate(c.orbit):
                assert target.mapping[idx] == c.orbit[(pos + 1) % c.length]


def test_malformed_permutation_rejected():
    with pytest.raises(ValueError):
        TargetTransform.permutation(3, {0: 1, 1: 1})
    with pytest.raises(ValueError):
        TargetTransform.permutation(2, {0: 5, 5: 0})


def test_cycle_spectrum_small_cases():
    single = cycle_decomposition(TargetTransform.permutation(1, {0: 0}))[0]
    spec = cycle_spectrum(single, 1)
    assert spec.eigenvalues == (1 + 0j,)
    assert np.allclose(spec.vectors, [[1.0]])

    swap = cycle_decomposition(TargetTransform.permutation(2, {0: 1, 1: 0}))[0]
    spec = cycle_spectrum(swap, 2)
    assert sorted(np.round(np.real(spec.eigenvalues)).tolist()) == [-1, 1]
    for col, lam in enumerate(spec.eigenvalues):
        expected = np.array([1.0, lam]) / np.sqrt(2)
        assert np.allclose(spec.vectors[:, col], expected)


def test_cycle_spectrum_eigenrelation():
    rng = np.random.default_rng(31)
    for _ in range(30):
        dim = int(rng.integers(2, 12))
        perm = rng.permutation(dim)
        target = TargetTransform.permutation(dim, {i: int(perm[i]) for i in range(dim)})
        mat = target.matrix()
        vectors = []
        for cycle in cycle_decomposition(target):
            spec = cycle_spectrum(cycle, dim)
            for lam, vec in zip(spec.eigenvalues, spec.vectors.T):
                assert np.linalg.norm(mat @ vec - lam * vec) < 1e-12
                vectors.append(vec)
        gram = np.array([[np.vdot(a, b) for b in vectors] for a in vectors])
        assert np.max(np.abs(gram - np.eye(dim))) < 1e-12


def test_spectral_components_group_by_exact_eigenvalue():
    # 2-cycle and 4-cycle share eigenvalues +1 and -1 exactly
    target = TargetTransform.permutation(
        6, {0: 1, 1: 0, 2: 3, 3: 4, 4: 5, 5: 2})
    components = dict(target.spectral_components())
    assert len(components[Fraction(0)]) == 2
    assert len(components[Fraction(1, 2)]) == 2
    assert len(components[Fraction(1, 4)]) == 1
    assert len(components[Fraction(3, 4)]) == 1


def test_restrict_round_trip():
    basis_dim = 8
    mapping = {2: 5, 5: 2, 3: 3, 6: 7, 7: 6}
    target = TargetTransform.permutation(basis_dim, mapping)
    block = [2, 3, 5, 6, 7]
    local = target.restrict(block)
    assert local.dim == 5
    assert local.mapping == {0: 2, 2: 0, 1: 1, 3: 4, 4: 3}
    with pytest.raises(ValueError):
        target.restrict([2])  # image 5 missing


def test_partial_isometry_matrix_and_components():
    dim = 3
    source = np.array([1.0, 0.0, 0.0], dtype=complex)
    bright = np.array([0.0, 1.0, 1.0], dtype=complex) / np.sqrt(2)
    target = TargetTransform.partial_isometry(dim, [(source, bright)])
    mat = target.matrix()
    assert np.max(np.abs(mat @ mat.conj().T - np.eye(dim))) < 1e-12
    assert np.allclose(mat @ source, bright)
    assert np.allclose(mat @ bright, source)
    dark = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2)
    assert np.allclose(mat @ dark, dark)  # kernel phase 0 keeps it fixed

    components = dict(target.spectral_components())
    assert len(components[Fraction(0)]) == 2  # bright combo + kernel
    assert len(components[Fraction(1, 2)]) == 1

    phased = TargetTransform.partial_isometry(
        dim, [(source, bright)], kernel_phase_turns=Fraction(1, 4))
    assert np.allclose(phased.matrix() @ dark, 1j * dark)


def test_partial_isometry_requires_orthonormal_vectors():
    dim = 2
    v = np.array([1.0, 0.0], dtype=complex)
    w = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    with pytest.raises(ValueError):
        TargetTransform.partial_isometry(dim, [(v, w)])  # overlapping pair


def test_target_json_round_trip():
    _, _, pairs = block_pairs()
    mirror = mirror_permutation(5, pairs)
    clone = TargetTransform.from_json(mirror.to_json())
    assert clone.mapping == mirror.mapping

    source = np.array([1.0, 0.0, 0.0], dtype=complex)
    bright = np.array([0.0, 1.0, 1.0], dtype=complex) / np.sqrt(2)
    iso = TargetTransform.partial_isometry(3, [(source, bright)],
                                           kernel_phase_turns=Fraction(1, 3))
    clone = TargetTransform.from_json(iso.to_json())
    assert np.allclose(clone.matrix(), iso.matrix())
