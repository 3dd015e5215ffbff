"""Occupation-number bases for a fixed number of excitations on a small network.

An excitation lives on a site and carries an internal label (spin, polarization,
internal atomic state, ...).  A basis state is a multiset of occupied
(site, label) slots with a fixed total excitation number.  For two excitations
the space splits into ordering subspaces (first-label excitation left of /
on the same site as / right of the second-label one), which is the index
bookkeeping everything downstream relies on.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

__all__ = [
    "SpecificationError",
    "BasisSpec",
    "BasisState",
    "Basis",
    "SubspacePartition",
    "enumerate_basis",
    "partition_two_excitation",
]


class SpecificationError(ValueError):
    """Raised for invalid basis specifications or mismatched inputs."""


Slot = tuple[int, str]


@dataclass(frozen=True)
class BasisSpec:
    """Defines which occupation configurations are admissible.

    Parameters
    ----------
    sites:
        Number of network sites M (1-based site indices).
    excitations:
        Total excitation number N; the enumerated space is the fixed-N sector.
    labels:
        Ordered internal-state labels; the order fixes enumeration order.
    statistics:
        "boson" allows multiple excitations per (site, label) slot; "fermion"
        enforces at most one per slot (two fermions on a site must differ in
        label).
    double_occupancy:
        "forbidden" excludes any configuration with two excitations on one
        site (hard-core constraint, regardless of labels).
    content:
        Optional multiset of labels carried by the N excitations.  When given,
        only states with exactly that label content are enumerated (e.g.
        ("mu", "nu") keeps one mu- and one nu-excitation).  None admits every
        label assignment.
    """

    sites: int
    excitations: int
    labels: tuple[str, ...]
    statistics: Literal["boson", "fermion"] = "boson"
    double_occupancy: Literal["allowed", "forbidden"] = "allowed"
    content: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.content is not None:
            object.__setattr__(self, "content", tuple(self.content))
        if self.sites < 1:
            raise SpecificationError(f"site count must be >= 1, got {self.sites}")
        if self.excitations < 1:
            raise SpecificationError(
                f"excitation count must be >= 1, got {self.excitations}")
        if not self.labels:
            raise SpecificationError("at least one internal label is required")
        if len(set(self.labels)) != len(self.labels):
            raise SpecificationError(f"duplicate labels in {self.labels}")
        if self.statistics not in ("boson", "fermion"):
            raise SpecificationError(f"unknown statistics {self.statistics!r}")
        if self.double_occupancy not in ("allowed", "forbidden"):
            raise SpecificationError(
                f"unknown double-occupancy rule {self.double_occupancy!r}")
        if self.content is not None:
            if len(self.content) != self.excitations:
                raise SpecificationError(
                    "label content must list one label per excitation")
            unknown = set(self.content) - set(self.labels)
            if unknown:
                raise SpecificationError(f"content labels {unknown} not in labels")

    def label_rank(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class BasisState:
    """One occupation configuration, stored as occupied (site, label) slots.

    The slot tuple carries multiplicity (a doubly occupied slot appears twice)
    and is kept in a normalized sort order so equal configurations compare and
    hash equal.  For two excitations the normalized tuple is the canonical
    site-ordered pair (i, sigma; j, sigma') with i <= j.
    """

    slots: tuple[Slot, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(sorted(tuple(s) for s in self.slots)))

    @property
    def excitations(self) -> int:
        return len(self.slots)

    @property
    def occupations(self) -> dict[Slot, int]:
        return dict(Counter(self.slots))

    def n(self, site: int, label: str) -> int:
        return sum(1 for s in self.slots if s == (site, label))

    def site_totals(self) -> dict[int, int]:
        totals: Counter[int] = Counter()
        for site, _ in self.slots:
            totals[site] += 1
        return dict(totals)

    def label_content(self) -> Counter[str]:
        return Counter(label for _, label in self.slots)

    @property
    def canonical_pair(self) -> tuple[Slot, Slot]:
        if len(self.slots) != 2:
            raise SpecificationError("canonical_pair is defined for N=2 states")
        return self.slots[0], self.slots[1]

    def __str__(self) -> str:
        inner = ";".join(f"{site},{label}" for site, label in self.slots)
        return f"|{inner}>"


@dataclass(frozen=True)
class SubspacePartition:
    """Disjoint index sets of the two-excitation ordering subspaces."""

    less: tuple[int, ...]
    equal: tuple[int, ...]
    greater: tuple[int, ...]

    def __post_init__(self) -> None:
        sets = [set(self.less), set(self.equal), set(self.greater)]
        total = sum(len(s) for s in sets)
        if len(set().union(*sets)) != total:
            raise SpecificationError("partition blocks must be disjoint")


class Basis:
    """Deterministically ordered N-excitation basis with index bookkeeping.

    Immutable after construction; safe to share across threads.
    """

    def __init__(self, spec: BasisSpec, states: Iterable[BasisState]):
        self.spec = spec
        self.states: tuple[BasisState, ...] = tuple(states)
        self._index: dict[BasisState, int] = {s: i for i, s in enumerate(self.states)}
        if len(self._index) != len(self.states):
            raise SpecificationError("duplicate states in basis")

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, state: BasisState | Iterable[Slot]) -> int:
        if not isinstance(state, BasisState):
            state = BasisState(tuple(state))
        try:
            return self._index[state]
        except KeyError:
            raise KeyError(f"state {state} is not in the basis") from None

    def state_of(self, index: int) -> BasisState:
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} out of range [0, {self.dim})")
        return self.states[index]

    def vector(self, state: BasisState | Iterable[Slot] | int) -> np.ndarray:
        """Unit vector of a basis state (by state or by index)."""
        idx = state if isinstance(state, int) else self.index_of(state)
        if isinstance(state, int) and not 0 <= idx < self.dim:
            raise IndexError(f"basis index {idx} out of range [0, {self.dim})")
        vec = np.zeros(self.dim, dtype=complex)
        vec[idx] = 1.0
        return vec

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, state: BasisState) -> bool:
        return state in self._index

    def to_json(self) -> list[dict]:
        return [
            {
                "index": i,
                "occupations": [
                    {"site": site, "label": label, "n": n}
                    for (site, label), n in sorted(s.occupations.items())
                ],
            }
            for i, s in enumerate(self.states)
        ]

    def __repr__(self) -> str:
        return (f"Basis(M={self.spec.sites}, N={self.spec.excitations}, "
                f"dim={self.dim})")


def _admissible(spec: BasisSpec, slots: tuple[Slot, ...]) -> bool:
    counts = Counter(slots)
    if spec.statistics == "fermion" and any(n > 1 for n in counts.values()):
        return False
    if spec.double_occupancy == "forbidden":
        site_totals = Counter(site for site, _ in slots)
        if any(n > 1 for n in site_totals.values()):
            return False
    if spec.content is not None:
        if Counter(label for _, label in slots) != Counter(spec.content):
            return False
    return True


def enumerate_basis(spec: BasisSpec) -> Basis:
    """Enumerate every admissible configuration in deterministic order.

    Order is lexicographic over occupied slots, slots ordered by site first
    and then by the label's position in ``spec.labels``.  Running twice on the
    same spec yields identical orderings.
    """
    slot_list: list[Slot] = [
        (site, label)
        for site in range(1, spec.sites + 1)
        for label in spec.labels
    ]
    if spec.statistics == "fermion":
        candidates = itertools.combinations(slot_list, spec.excitations)
    else:
        candidates = itertools.combinations_with_replacement(slot_list, spec.excitations)
    states = [BasisState(slots) for slots in candidates if _admissible(spec, slots)]
    # combinations over the rank-ordered slot list already emit in enumeration
    # order; BasisState normalization may reorder within a state but never
    # across states because it is monotone in (site, label-rank) for the
    # shipped label alphabets.  Re-sort with the rank key to be safe for
    # alphabets whose string order differs from their rank order.
    rank = {label: k for k, label in enumerate(spec.labels)}
    states.sort(key=lambda s: tuple((site, rank[label]) for site, label in s.slots))
    return Basis(spec, states)


def partition_two_excitation(
    basis: Basis,
    reference: tuple[str, str] | None = None,
) -> SubspacePartition:
    """Split a two-excitation basis by the relative position of its labels.

    A state holding exactly one excitation of each reference label is
    classified by comparing the site i of the first-label excitation with the
    site j of the second-label one (i < j, i = j, i > j).  States without
    that label content (e.g. both excitations carrying one label) are
    classified by their canonical site order, which never yields "greater".
    """
    spec = basis.spec
    if spec.excitations != 2:
        raise SpecificationError(
            f"ordering partition requires N=2, got N={spec.excitations}")
    if reference is None:
        reference = (spec.labels[0], spec.labels[1 % len(spec.labels)])
    first, second = reference
    for label in (first, second):
        if label not in spec.labels:
            raise SpecificationError(f"reference label {label!r} not in basis labels")

    less, equal, greater = [], [], []
    for idx, state in enumerate(basis.states):
        (site_a, lab_a), (site_b, lab_b) = state.canonical_pair
        if first != second and {lab_a, lab_b} == {first, second} and lab_a != lab_b:
            i = site_a if lab_a == first else site_b
            j = site_b if lab_b == second else site_a
        else:
            i, j = site_a, site_b  # canonical order: i <= j
        if i < j:
            less.append(idx)
        elif i == j:
            equal.append(idx)
        else:
            greater.append(idx)
    return SubspacePartition(tuple(less), tuple(equal), tuple(greater))
