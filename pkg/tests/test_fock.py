import pytest

from pstnet.fock import (
    BasisSpec,
    BasisState,
    SpecificationError,
    enumerate_basis,
    partition_two_excitation,
)


def two_label_spec(sites=5, occupancy="forbidden"):
    return BasisSpec(sites=sites, excitations=2, labels=("mu", "nu"),
                     double_occupancy=occupancy, content=("mu", "nu"))


def test_single_excitation_count():
    basis = enumerate_basis(BasisSpec(sites=5, excitations=1, labels=("mu",)))
    assert basis.dim == 5
    assert str(basis.state_of(0)) == "|1,mu>"
    assert str(basis.state_of(4)) == "|5,mu>"


def test_distinguishable_pair_count_and_blocks():
    basis = enumerate_basis(two_label_spec())
    assert basis.dim == 20
    part = partition_two_excitation(basis)
    assert (len(part.less), len(part.equal), len(part.greater)) == (10, 0, 10)


@pytest.mark.parametrize("sites", [2, 3, 4, 5, 6])
def test_count_identity(sites):
    basis = enumerate_basis(two_label_spec(sites))
    assert basis.dim == sites * (sites - 1)
    part = partition_two_excitation(basis)
    assert len(part.less) == len(part.greater) == sites * (sites - 1) // 2


def test_fermion_pauli_rule():
    spec = BasisSpec(sites=3, excitations=2, labels=("up", "dn"),
                     statistics="fermion", double_occupancy="allowed")
    basis = enumerate_basis(spec)
    # full sector: C(6, 2) slot pairs
    assert basis.dim == 15
    for state in basis:
        assert all(n <= 1 for n in state.occupations.values())
    same_site = [s for s in basis if len(s.site_totals()) == 1]
    assert len(same_site) == 3
    assert all(sorted(lab for _, lab in s.slots) == ["dn", "up"] for s in same_site)


def test_boson_same_label_equal_block():
    spec = BasisSpec(sites=3, excitations=2, labels=("mu",))
    basis = enumerate_basis(spec)
    assert basis.dim == 6  # 3 pairs + 3 doubly occupied
    part = partition_two_excitation(basis)
    assert len(part.equal) == 3
    assert len(part.greater) == 0


def test_block_order_is_pair_lexicographic():
    basis = enumerate_basis(two_label_spec())
    block = partition_two_excitation(basis).less
    first = basis.state_of(block[0])
    last = basis.state_of(block[-1])
    assert first.canonical_pair == ((1, "mu"), (2, "nu"))
    assert last.canonical_pair == ((4, "mu"), (5, "nu"))


def test_ordering_examples():
    basis = enumerate_basis(two_label_spec())
    part = partition_two_excitation(basis)
    assert basis.index_of(((1, "mu"), (2, "nu"))) in part.less
    # mu on site 2, nu on site 1: canonical form |1,nu;2,mu>
    assert basis.index_of(((2, "mu"), (1, "nu"))) in part.greater


def test_codec_bijection():
    for spec in (
        two_label_spec(),
        BasisSpec(sites=3, excitations=2, labels=("mu",)),
        BasisSpec(sites=4, excitations=3, labels=("mu", "nu")),
        BasisSpec(sites=3, excitations=2, labels=("up", "dn"), statistics="fermion"),
    ):
        basis = enumerate_basis(spec)
        for idx, state in enumerate(basis):
            assert basis.index_of(state) == idx
            assert basis.state_of(idx) == state
        assert basis.index_of(basis.state_of(0)) == 0


def test_codec_errors():
    basis = enumerate_basis(two_label_spec())
    with pytest.raises(KeyError):
        basis.index_of(((1, "mu"), (1, "nu")))  # double occupancy excluded
    with pytest.raises(IndexError):
        basis.state_of(basis.dim)
    with pytest.raises(IndexError):
        basis.state_of(-1)


def test_partition_is_disjoint_cover():
    for occupancy in ("allowed", "forbidden"):
        basis = enumerate_basis(two_label_spec(occupancy=occupancy))
        part = partition_two_excitation(basis)
        combined = sorted(part.less + part.equal + part.greater)
        assert combined == list(range(basis.dim))


def test_enumeration_is_deterministic():
    a = enumerate_basis(two_label_spec())
    b = enumerate_basis(two_label_spec())
    assert a.states == b.states


def test_general_excitation_number():
    spec = BasisSpec(sites=3, excitations=3, labels=("mu",))
    basis = enumerate_basis(spec)
    # multisets of size 3 over 3 slots
    assert basis.dim == 10
    assert all(s.excitations == 3 for s in basis)


def test_invalid_specs():
    with pytest.raises(SpecificationError):
        BasisSpec(sites=0, excitations=1, labels=("mu",))
    with pytest.raises(SpecificationError):
        BasisSpec(sites=2, excitations=0, labels=("mu",))
    with pytest.raises(SpecificationError):
        BasisSpec(sites=2, excitations=1, labels=())
    with pytest.raises(SpecificationError):
        BasisSpec(sites=2, excitations=2, labels=("mu",), content=("mu",))
    with pytest.raises(SpecificationError):
        BasisSpec(sites=2, excitations=1, labels=("mu",), statistics="anyon")


def test_partition_requires_two_excitations():
    basis = enumerate_basis(BasisSpec(sites=3, excitations=1, labels=("mu",)))
    with pytest.raises(SpecificationError):
        partition_two_excitation(basis)


def test_state_normalization_and_vacuum_absent():
    state = BasisState(((2, "nu"), (1, "mu")))
    assert state.slots == ((1, "mu"), (2, "nu"))
    basis = enumerate_basis(two_label_spec())
    assert all(s.excitations == 2 for s in basis)  # no vacuum entry


def test_basis_json_schema():
    basis = enumerate_basis(two_label_spec(sites=2))
    dump = basis.to_json()
    assert dump[0]["index"] == 0
    assert dump[0]["occupations"] == [
        {"site": 1, "label": "mu", "n": 1},
        {"site": 2, "label": "nu", "n": 1},
    ]
