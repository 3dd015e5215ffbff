"""Target transformations for state transfer and their exact eigenstructure.

A transfer goal is either a permutation of basis indices (possibly with fixed
points off its support) or a partial isometry given as orthonormal
source/target vector pairs, completed to a unitary by swapping each pair and
applying a chosen phase on the orthogonal complement of the pair span.

Permutations decompose into disjoint cycles.  A cycle of length L has the
nondegenerate spectrum exp(i 2 pi n / L) with discrete-Fourier eigenvectors
over its orbit; collecting equal eigenvalues across cycles yields the
degenerate eigenspaces that spectral synthesis mixes.  Eigenvalues are
tracked exactly as rational turns (n/L of a full circle) so that equality
across cycles never depends on floating-point comparisons.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fock import Basis, SpecificationError

__all__ = [
    "TargetTransform",
    "Cycle",
    "CycleSpectrum",
    "mirror_permutation",
    "parity_permutation",
    "cycle_decomposition",
    "cycle_spectrum",
]


def phase_from_turns(turns: Fraction) -> complex:
    return cmath.exp(2j * cmath.pi * float(turns))


class TargetTransform:
    """A unitary transfer goal over ``dim`` basis indices."""

    def __init__(
        self,
        dim: int,
        *,
        mapping: dict[int, int] | None = None,
        pairs: list[tuple[np.ndarray, np.ndarray]] | None = None,
        kernel_phase_turns: Fraction = Fraction(0),
    ):
        if (mapping is None) == (pairs is None):
            raise ValueError("provide exactly one of mapping / pairs")
        self.dim = int(dim)
        self.kernel_phase_turns = Fraction(kernel_phase_turns)
        if mapping is not None:
            self.kind = "permutation"
            self.mapping = {int(k): int(v) for k, v in mapping.items()}
            self.pairs = None
            self._validate_mapping()
        else:
            self.kind = "partial_isometry"
            self.mapping = None
            self.pairs = [
                (np.asarray(s, dtype=complex), np.asarray(t, dtype=complex))
                for s, t in pairs
            ]
            self._validate_pairs()

    @classmethod
    def permutation(cls, dim: int, mapping: dict[int, int]) -> "TargetTransform":
        return cls(dim, mapping=mapping)

    @classmethod
    def partial_isometry(
        cls,
        dim: int,
        pairs: list[tuple[np.ndarray, np.ndarray]],
        kernel_phase_turns: Fraction = Fraction(0),
    ) -> "TargetTransform":
        return cls(dim, pairs=pairs, kernel_phase_turns=kernel_phase_turns)

    def _validate_mapping(self) -> None:
        keys = set(self.mapping)
        values = set(self.mapping.values())
        if keys != values:
            raise ValueError("mapping is not a bijection on its support")
        if len(values) != len(self.mapping):
            raise ValueError("mapping has repeated images")
        for idx in keys | values:
            if not 0 <= idx < self.dim:
                raise ValueError(f"index {idx} outside [0, {self.dim})")

    def _validate_pairs(self, atol: float = 1e-10) -> None:
        vectors = []
        for s, t in self.pairs:
            if s.shape != (self.dim,) or t.shape != (self.dim,):
                raise ValueError("pair vectors must have length dim")
            vectors.extend((s, t))
        gram = np.array([[np.vdot(a, b) for b in vectors] for a in vectors])
        if np.max(np.abs(gram - np.eye(len(vectors)))) > atol:
            raise ValueError(
                "source and target vectors must be mutually orthonormal")

    @property
    def support(self) -> tuple[int, ...]:
        """Indices the transform acts on nontrivially (permutation kind)."""
        if self.kind != "permutation":
            raise ValueError("support is defined for permutation targets")
        return tuple(sorted(self.mapping))

    def matrix(self) -> np.ndarray:
        """Dense unitary: mapped indices/pairs plus the fixed complement."""
        if self.kind == "permutation":
            mat = np.zeros((self.dim, self.dim), dtype=complex)
            for idx in range(self.dim):
                mat[self.mapping.get(idx, idx), idx] = 1.0
            return mat
        kernel = np.eye(self.dim, dtype=complex)
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        for s, t in self.pairs:
            mat += np.outer(t, s.conj()) + np.outer(s, t.conj())
            kernel -= np.outer(s, s.conj()) + np.outer(t, t.conj())
        mat += phase_from_turns(self.kernel_phase_turns) * kernel
        return mat

    def spectral_components(self) -> list[tuple[Fraction, list[np.ndarray]]]:
        """Eigenvalue turns with per-eigenvalue orthonormal eigenvectors.

        The list is sorted by turns in [0, 1); vector order within a
        component follows cycle order (permutations) or pair order then
        complement order (partial isometries), so results are deterministic.
        """
        groups: dict[Fraction, list[np.ndarray]] = {}
        if self.kind == "permutation":
            for cyc in cycle_decomposition(self):
                spectrum = cycle_spectrum(cyc, self.dim)
                for turns, vec in zip(spectrum.turns, spectrum.vectors.T):
                    groups.setdefault(turns, []).append(vec)
        else:
            half = Fraction(1, 2)
            for s, t in self.pairs:
                groups.setdefault(Fraction(0), []).append((s + t) / np.sqrt(2.0))
                groups.setdefault(half, []).append((s - t) / np.sqrt(2.0))
            kernel = np.eye(self.dim, dtype=complex)
            for s, t in self.pairs:
                kernel -= np.outer(s, s.conj()) + np.outer(t, t.conj())
            # deterministic orthonormal basis of the complement
            eigvals, eigvecs = np.linalg.eigh(kernel)
            comp = [eigvecs[:, k] for k in range(self.dim) if eigvals[k] > 0.5]
            key = self.kernel_phase_turns % 1
            for vec in comp:
                groups.setdefault(key, []).append(vec)
        return sorted(groups.items(), key=lambda item: item[0])

    def restrict(self, indices: list[int]) -> "TargetTransform":
        """Re-express a permutation over a block of retained indices."""
        if self.kind != "permutation":
            raise ValueError("restrict is implemented for permutation targets")
        index_set = set(indices)
        local = {idx: k for k, idx in enumerate(indices)}
        mapping = {}
        for src, dst in self.mapping.items():
            if src in index_set:
                if dst not in index_set:
                    raise ValueError(
                        f"support is not closed under restriction: {src} -> {dst}")
                mapping[local[src]] = local[dst]
        return TargetTransform.permutation(len(indices), mapping)

    def to_json(self) -> dict:
        if self.kind == "permutation":
            return {
                "kind": "permutation",
                "dim": self.dim,
                "map": {str(k): v for k, v in sorted(self.mapping.items())},
            }
        return {
            "kind": "partial_isometry",
            "dim": self.dim,
            "kernel_phase_turns": [self.kernel_phase_turns.numerator,
                                   self.kernel_phase_turns.denominator],
            "pairs": [
                {
                    "source": [[z.real, z.imag] for z in s],
                    "target": [[z.real, z.imag] for z in t],
                }
                for s, t in self.pairs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TargetTransform":
        dim = int(data["dim"])
        if data["kind"] == "permutation":
            mapping = {int(k): int(v) for k, v in data["map"].items()}
            return cls.permutation(dim, mapping)
        if data["kind"] == "partial_isometry":
            pairs = [
                (
                    np.array([complex(re, im) for re, im in entry["source"]]),
                    np.array([complex(re, im) for re, im in entry["target"]]),
                )
                for entry in data["pairs"]
            ]
            num, den = data.get("kernel_phase_turns", [0, 1])
            return cls.partial_isometry(dim, pairs, Fraction(num, den))
        raise ValueError(f"unknown target kind {data['kind']!r}")

    def __repr__(self) -> str:
        if self.kind == "permutation":
            return f"TargetTransform(permutation, dim={self.dim}, support={len(self.mapping)})"
        return f"TargetTransform(partial_isometry, dim={self.dim}, pairs={len(self.pairs)})"


@dataclass(frozen=True)
class Cycle:
    """One disjoint cycle of a permutation.

    ``members`` lists the cycled indices in ascending order; ``orbit`` lists
    them in traversal order starting from the smallest, i.e. the permutation
    sends orbit[m] to orbit[m + 1 mod L].  The eigenvector phase of an index
    is assigned from its orbit position, which reduces to the ascending rank
    whenever the cycle traverses its support monotonically (every involution
    does).
    """

    members: tuple[int, ...]
    orbit: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.members)

    def zeta(self, index: int) -> int:
        """Exponent of the eigenvalue in the eigenvector component on index."""
        m = self.orbit.index(index)
        return (self.length - m) % self.length


@dataclass(frozen=True)
class CycleSpectrum:
    """Exact eigenpairs of one cycle, embedded in the full index space."""

    turns: tuple[Fraction, ...]
    eigenvalues: tuple[complex, ...]
    vectors: np.ndarray  # shape (dim, L), one eigenvector per column


def cycle_decomposition(target: TargetTransform) -> list[Cycle]:
    """Disjoint cycles covering the support, ordered by smallest member."""
    if target.kind != "permutation":
        raise ValueError("cycle decomposition requires a permutation target")
    mapping = target.mapping
    seen: set[int] = set()
    cycles: list[Cycle] = []
    for start in sorted(mapping):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        nxt = mapping[start]
        while nxt != start:
            orbit.append(nxt)
            seen.add(nxt)
            nxt = mapping[nxt]
        cycles.append(Cycle(members=tuple(sorted(orbit)), orbit=tuple(orbit)))
    return cycles


def cycle_spectrum(cycle: Cycle, dim: int) -> CycleSpectrum:
    """Spectrum exp(i 2 pi n / L) with Fourier eigenvectors over the orbit.

    The eigenvector for eigenvalue lambda has component lambda**zeta(k) /
    sqrt(L) on member k and zeros elsewhere.
    """
    length = cycle.length
    turns = tuple(Fraction(n, length) % 1 for n in range(length))
    eigenvalues = tuple(phase_from_turns(t) for t in turns)
    vectors = np.zeros((dim, length), dtype=complex)
    norm = 1.0 / np.sqrt(length)
    for col, lam in enumerate(eigenvalues):
        for member in cycle.members:
            vectors[member, col] = norm * lam ** cycle.zeta(member)
    return CycleSpectrum(turns=turns, eigenvalues=eigenvalues, vectors=vectors)


def mirror_permutation(sites: int, pairs: list[tuple[int, int]]) -> TargetTransform:
    """Mirror map (i, j) -> (M+1-j, M+1-i) over an ordered list of site pairs.

    ``pairs`` fixes the index space: entry k of the list is basis index k of
    the block (e.g. the i<j ordering subspace in enumeration order).  The
    result is an involution on the whole block.
    """
    if sites < 2:
        raise SpecificationError(f"mirror permutation needs M >= 2, got {sites}")
    index = {tuple(pair): k for k, pair in enumerate(pairs)}
    mapping = {}
    for (i, j), k in index.items():
        if not (1 <= i < j <= sites):
            raise SpecificationError(f"pair ({i}, {j}) is not an ordered site pair")
        image = (sites + 1 - j, sites + 1 - i)
        if image not in index:
            raise SpecificationError(f"mirror image {image} of ({i}, {j}) not in block")
        mapping[k] = index[image]
    return TargetTransform.permutation(len(pairs), mapping)


def parity_permutation(basis: Basis, reference: tuple[str, str] | None = None) -> TargetTransform:
    """Site inversion restricted to odd-parity pairs of a two-excitation basis.

    Maps |i,mu;j,nu> to |(M+1-i),mu;(M+1-j),nu> for every labeled state whose
    site pair satisfies i + j odd; even-parity states are left off the
    support.  Labels travel with their excitation, so a mapped state whose
    sites land in reversed order re-canonicalizes with the labels swapped
    onto the new positions (|1,mu;2,nu> -> |4,nu;5,mu> for M = 5).
    """
    spec = basis.spec
    if spec.excitations != 2:
        raise SpecificationError("parity permutation requires a two-excitation basis")
    sites = spec.sites
    mapping = {}
    for idx, state in enumerate(basis.states):
        (site_a, lab_a), (site_b, lab_b) = state.canonical_pair
        if (site_a + site_b) % 2 == 0:
            continue
        image = ((sites + 1 - site_a, lab_a), (sites + 1 - site_b, lab_b))
        mapping[idx] = basis.index_of(image)
    return TargetTransform.permutation(basis.dim, mapping)
