"""Physical network Hamiltonians in a fixed excitation sector.

The model has onsite energies per (site, label), number-number interactions
between (site, label) slots, and label-preserving hopping between sites:

    H = sum eps(i, sigma) n(i, sigma)
      + 1/2 sum U(i, sigma; k, sigma') n(i, sigma) (n(k, sigma') - delta)
      + sum_{i<k, sigma} J(i, k) (a^dag(i, sigma) a(k, sigma) + h.c.)

Couplings are insensitive to the internal label.  Interaction and onsite
values accept the wildcard label "*" to state label-insensitive parameters
once instead of once per label combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import Basis, BasisState, SpecificationError
from .operators import HermitianOperator
from .targets import TargetTransform

__all__ = [
    "ANY_LABEL",
    "CouplingLayout",
    "inverse_distance_couplings",
    "ModelParams",
    "build_hamiltonian",
    "apply_centrosymmetry",
    "commutator_residual",
    "nn_pst_chain",
    "DecouplingReport",
    "decoupling_margin",
]

ANY_LABEL = "*"

EpsKey = tuple[int, str]
IntKey = tuple[tuple[int, str], tuple[int, str]]
HopKey = tuple[int, int]


def _interaction_key(site_a: int, label_a: str, site_b: int, label_b: str) -> IntKey:
    a, b = (site_a, label_a), (site_b, label_b)
    return (a, b) if a <= b else (b, a)


def _hop_key(site_a: int, site_b: int) -> HopKey:
    return (site_a, site_b) if site_a < site_b else (site_b, site_a)


@dataclass
class CouplingLayout:
    """Named coupling geometries that expand to a {(i, k): J} table."""

    kind: str  # "nearest_neighbor" | "inverse_distance" | "explicit"
    nn_values: tuple[float, ...] | None = None
    base: float | None = None
    r1: float | None = None
    r2: float | None = None
    table: dict[HopKey, float] | None = None

    def couplings(self, sites: int) -> dict[HopKey, float]:
        if self.kind == "nearest_neighbor":
            values = self.nn_values or ()
            if len(values) != sites - 1:
                raise SpecificationError(
                    f"nearest-neighbor layout for M={sites} needs {sites - 1} values")
            return {(i, i + 1): float(v) for i, v in enumerate(values, start=1)}
        if self.kind == "inverse_distance":
            if sites != 5:
                raise SpecificationError(
                    "the inverse-distance layout is defined for M=5")
            base, r1, r2 = self.base, self.r1, self.r2
            if r1 is None or r2 is None or r1 <= 0 or r2 <= 0:
                raise SpecificationError("distances r1, r2 must be positive")
            half = {
                (1, 2): base / r1,
                (1, 3): base / (r1 + r2),
                (1, 4): base / (r1 + 2 * r2),
                (1, 5): base / (2 * r1 + 2 * r2),
                (2, 3): base / r2,
                (2, 4): base / (2 * r2),
            }
            full = dict(half)
            for (i, k), value in half.items():
                full.setdefault(_hop_key(sites + 1 - k, sites + 1 - i), value)
            return full
        if self.kind == "explicit":
            return dict(self.table or {})
        raise SpecificationError(f"unknown layout kind {self.kind!r}")

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.kind == "nearest_neighbor":
            data["values"] = list(self.nn_values or ())
        elif self.kind == "inverse_distance":
            data.update({"J": self.base, "r1": self.r1, "r2": self.r2})
        elif self.kind == "explicit":
            data["couplings"] = [[i, k, v] for (i, k), v in sorted((self.table or {}).items())]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CouplingLayout":
        kind = data["kind"]
        if kind == "nearest_neighbor":
            return cls(kind=kind, nn_values=tuple(data["values"]))
        if kind == "inverse_distance":
            return cls(kind=kind, base=float(data["J"]), r1=float(data["r1"]),
                       r2=float(data["r2"]))
        if kind == "explicit":
            return cls(kind=kind, table={(int(i), int(k)): float(v)
                                         for i, k, v in data["couplings"]})
        raise SpecificationError(f"unknown layout kind {kind!r}")


def inverse_distance_couplings(base: float, r1: float, r2: float) -> CouplingLayout:
    """Linear-geometry couplings J/d with centrosymmetric distances.

    Sites sit on a line at spacings (r1, r2, r2, r1); every pair couples with
    base / distance, so J(1,2) = J/r1, J(1,3) = J/(r1+r2), J(1,4) = J/(r1+2 r2),
    J(1,5) = J/(2 r1 + 2 r2), J(2,3) = J/r2, J(2,4) = J/(2 r2), and mirror
    partners follow by centrosymmetry.
    """
    if r1 <= 0 or r2 <= 0:
        raise SpecificationError(f"distances must be positive, got r1={r1}, r2={r2}")
    return CouplingLayout(kind="inverse_distance", base=float(base),
                          r1=float(r1), r2=float(r2))


@dataclass
class ModelParams:
    """Physical parameters of the network Hamiltonian plus the transfer time.

    ``epsilon`` maps (site, label) to an onsite energy, ``interactions`` maps
    a canonical ((site, label), (site, label)) key to an interaction energy
    (positive repulsive, negative attractive; equal slots mean same-state
    onsite interaction), and ``couplings`` maps (i, k) with i < k to the real
    hopping amplitude.  The wildcard label "*" matches any label and is the
    convenient way to express label-insensitive energies.
    """

    sites: int
    tau: float = 1.0
    epsilon: dict[EpsKey, float] = field(default_factory=dict)
    interactions: dict[IntKey, float] = field(default_factory=dict)
    couplings: dict[HopKey, float] = field(default_factory=dict)
    layout: CouplingLayout | None = None

    def __post_init__(self) -> None:
        if self.sites < 1:
            raise SpecificationError(f"site count must be >= 1, got {self.sites}")
        if not self.tau > 0:
            raise SpecificationError(f"transfer time must be positive, got {self.tau}")
        if self.layout is not None and not self.couplings:
            self.couplings = self.layout.couplings(self.sites)
        for (i, k) in self.couplings:
            if not (1 <= i < k <= self.sites):
                raise SpecificationError(f"coupling key ({i}, {k}) must have 1 <= i < k <= M")

    def eps(self, site: int, label: str) -> float:
        if (site, label) in self.epsilon:
            return self.epsilon[(site, label)]
        return self.epsilon.get((site, ANY_LABEL), 0.0)

    def interaction(self, site_a: int, label_a: str, site_b: int, label_b: str) -> float:
        key = _interaction_key(site_a, label_a, site_b, label_b)
        if key in self.interactions:
            return self.interactions[key]
        return self.interactions.get(
            _interaction_key(site_a, ANY_LABEL, site_b, ANY_LABEL), 0.0)

    def coupling(self, site_a: int, site_b: int) -> float:
        return self.couplings.get(_hop_key(site_a, site_b), 0.0)

    def set_uniform_epsilon(self, value: float) -> "ModelParams":
        for site in range(1, self.sites + 1):
            self.epsilon[(site, ANY_LABEL)] = float(value)
        return self

    def set_site_epsilon(self, site: int, value: float, label: str = ANY_LABEL) -> "ModelParams":
        self.epsilon[(site, label)] = float(value)
        return self

    def set_nn_interaction(self, value: float) -> "ModelParams":
        """Label-insensitive interaction W between adjacent sites."""
        for site in range(1, self.sites):
            self.interactions[_interaction_key(site, ANY_LABEL, site + 1, ANY_LABEL)] = float(value)
        return self

    def set_onsite_interaction(self, value: float) -> "ModelParams":
        """Label-insensitive same-site interaction U on every site."""
        for site in range(1, self.sites + 1):
            self.interactions[_interaction_key(site, ANY_LABEL, site, ANY_LABEL)] = float(value)
        return self

    def onsite_interaction_values(self) -> list[float]:
        return [v for ((sa, _), (sb, _)), v in self.interactions.items() if sa == sb]

    def copy(self) -> "ModelParams":
        return ModelParams(
            sites=self.sites,
            tau=self.tau,
            epsilon=dict(self.epsilon),
            interactions=dict(self.interactions),
            couplings=dict(self.couplings),
            layout=self.layout,
        )

    def to_json(self) -> dict:
        return {
            "M": self.sites,
            "tau": self.tau,
            "epsilon": [[site, label, value]
                        for (site, label), value in sorted(self.epsilon.items())],
            "U": [[ka[0], kb[0], ka[1], kb[1], value]
                  for (ka, kb), value in sorted(self.interactions.items())],
            "J": [[i, k, value] for (i, k), value in sorted(self.couplings.items())],
            "layout": self.layout.to_json() if self.layout else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelParams":
        layout = CouplingLayout.from_json(data["layout"]) if data.get("layout") else None
        params = cls(
            sites=int(data["M"]),
            tau=float(data.get("tau", 1.0)),
            epsilon={(int(site), str(label)): float(v)
                     for site, label, v in data.get("epsilon", [])},
            interactions={
                _interaction_key(int(i), str(sa), int(k), str(sb)): float(v)
                for i, k, sa, sb, v in data.get("U", [])
            },
            couplings={(int(i), int(k)): float(v) for i, k, v in data.get("J", [])},
            layout=None,
        )
        if not params.couplings and layout is not None:
            params.couplings = layout.couplings(params.sites)
        params.layout = layout
        return params


def _diagonal_energy(params: ModelParams, state: BasisState) -> float:
    occupations = state.occupations
    slots = list(occupations.items())
    energy = 0.0
    for (site, label), n in slots:
        energy += params.eps(site, label) * n
        # same-slot term: 1/2 U n (n - 1)
        energy += 0.5 * params.interaction(site, label, site, label) * n * (n - 1)
    for a in range(len(slots)):
        (site_a, lab_a), na = slots[a]
        for b in range(a + 1, len(slots)):
            (site_b, lab_b), nb = slots[b]
            energy += params.interaction(site_a, lab_a, site_b, lab_b) * na * nb
    return energy


def _fermion_sign(slots: tuple, removed: tuple, added: tuple) -> int:
    """Sign of a^dag(added) a(removed) on an occupied-slot tuple.

    Slots are ordered by (site, label); the sign counts occupied slots the
    moved excitation passes, matching the slot-ordering convention of the
    second-quantized operator strings.
    """
    ordered = sorted(slots)
    below_removed = sum(1 for s in ordered if s < removed)
    remaining = list(ordered)
    remaining.remove(removed)
    below_added = sum(1 for s in remaining if s < added)
    return -1 if (below_removed + below_added) % 2 else 1


def build_hamiltonian(
    params: ModelParams,
    basis: Basis,
    restriction: list[int] | None = None,
) -> HermitianOperator:
    """Matrix of the network Hamiltonian over an enumerated basis.

    Diagonal entries are the interacting configuration energies; off-diagonal
    entries move one excitation between coupled sites with its label, with
    bosonic sqrt(n) amplitude factors and fermionic exchange signs.  If
    ``restriction`` is given, rows and columns outside those indices are
    dropped (the effective, truncated block).
    """
    if params.sites != basis.spec.sites:
        raise SpecificationError(
            f"params are for M={params.sites}, basis has M={basis.spec.sites}")
    dim = basis.dim
    fermion = basis.spec.statistics == "fermion"
    ham = np.zeros((dim, dim), dtype=complex)
    for col, state in enumerate(basis.states):
        ham[col, col] = _diagonal_energy(params, state)
        occupations = state.occupations
        for (site, label), n in occupations.items():
            for other in range(1, params.sites + 1):
                if other == site:
                    continue
                amplitude = params.coupling(site, other)
                if amplitude == 0.0:
                    continue
                target_slot = (other, label)
                new_count = occupations.get(target_slot, 0)
                if fermion and new_count >= 1:
                    continue
                if (basis.spec.double_occupancy == "forbidden"
                        and sum(m for (s, _), m in occupations.items()
                                if s == other) >= 1):
                    continue
                moved = list(state.slots)
                moved.remove((site, label))
                moved.append(target_slot)
                new_state = BasisState(tuple(moved))
                if new_state not in basis:
                    continue
                row = basis.index_of(new_state)
                factor = math.sqrt(n) * math.sqrt(new_count + 1)
                if fermion:
                    factor *= _fermion_sign(state.slots, (site, label), target_slot)
                ham[row, col] += amplitude * factor
    if restriction is not None:
        idx = list(restriction)
        ham = ham[np.ix_(idx, idx)]
    return HermitianOperator(ham)


def apply_centrosymmetry(params: ModelParams, tol: float = 1e-9) -> ModelParams:
    """Copy first-half parameters onto their mirror partners.

    Enforces J(i, k) = J(M+1-k, M+1-i), eps(i) = eps(M+1-i) and
    U(i, k) = U(M+1-k, M+1-i).  Pre-set mirror values that disagree beyond
    ``tol`` raise a constraint violation.
    """
    sites = params.sites
    result = params.copy()

    def mirror_fill(table: dict, mirror_key, label: str) -> None:
        for key in sorted(table):
            value = table[key]
            mkey = mirror_key(key)
            if mkey in table:
                if abs(table[mkey] - value) > tol:
                    raise SpecificationError(
                        f"centrosymmetry violated for {label} {key} vs {mkey}: "
                        f"{value} != {table[mkey]}")
            else:
                table[mkey] = value

    mirror_fill(result.couplings,
                lambda key: _hop_key(sites + 1 - key[1], sites + 1 - key[0]), "J")
    mirror_fill(result.epsilon,
                lambda key: (sites + 1 - key[0], key[1]), "epsilon")
    # mirror image of the pair state (a, s; b, s') is (M+1-b, s; M+1-a, s'):
    # sites flip and swap order, labels stay attached to their rank
    mirror_fill(
        result.interactions,
        lambda key: _interaction_key(sites + 1 - key[1][0], key[0][1],
                                     sites + 1 - key[0][0], key[1][1]),
        "U",
    )
    return result


def commutator_residual(ham: HermitianOperator, target: TargetTransform) -> float:
    """Frobenius norm of [P, H] on the common index space."""
    if ham.dim != target.dim:
        raise SpecificationError(
            f"dimension mismatch: H is {ham.dim}, target is {target.dim}")
    pmat = target.matrix()
    hmat = ham.matrix
    return float(np.linalg.norm(pmat @ hmat - hmat @ pmat))


def nn_pst_chain(sites: int, tau: float = 1.0) -> ModelParams:
    """Uniform-energy chain with J(i, i+1) ~ sqrt(i (M - i)).

    The normalization pi / (2 tau) makes the single-excitation spectrum
    equally spaced with gap pi / tau, so the propagator at tau is the mirror
    permutation up to a global phase.
    """
    if sites < 2:
        raise SpecificationError(f"chain needs M >= 2, got {sites}")
    scale = math.pi / (2.0 * tau)
    values = tuple(scale * math.sqrt(i * (sites - i)) for i in range(1, sites))
    layout = CouplingLayout(kind="nearest_neighbor", nn_values=values)
    return ModelParams(sites=sites, tau=tau, layout=layout)


@dataclass(frozen=True)
class DecouplingReport:
    """Timescale check tau << U / J^2 for ordering-subspace decoupling."""

    ratio: float
    ok: bool
    threshold: float

    def to_json(self) -> dict:
        return {"ratio": self.ratio, "ok": self.ok, "threshold": self.threshold}


def decoupling_margin(
    params: ModelParams,
    basis: Basis,
    threshold: float = 0.1,
) -> DecouplingReport:
    """ratio = tau * max J^2 / min |U_onsite|; ok iff ratio < threshold.

    A hard-core basis is structurally closed, reported as ratio 0.  Without
    onsite interaction but with double occupancy allowed, the subspaces mix
    freely: ratio infinity, not ok.
    """
    if basis.spec.double_occupancy == "forbidden":
        return DecouplingReport(ratio=0.0, ok=True, threshold=threshold)
    max_j2 = max((v * v for v in params.couplings.values()), default=0.0)
    onsite = [abs(v) for v in params.onsite_interaction_values()]
    min_u = min(onsite) if onsite else 0.0
    if min_u == 0.0:
        ratio = math.inf if max_j2 > 0 else 0.0
    else:
        ratio = params.tau * max_j2 / min_u
    return DecouplingReport(ratio=ratio, ok=ratio < threshold, threshold=threshold)
