"""Construct Hamiltonians whose propagator realizes a target transform at tau.

Given the exact eigenstructure of a target unitary (eigenvalue lambda with
degeneracy eta), every Hamiltonian of the form

    H = (1/tau) * sum over (lambda, a) of e(lambda, a) |y(lambda, a)><y(lambda, a)|

with e(lambda, a) = -arg(lambda) + 2 pi x(lambda, a), integer x, and the
|y(lambda, a)> an orthonormal basis of the lambda-eigenspace (unitary mixing
beta of the per-cycle eigenvectors) satisfies exp(-iH tau) = target exactly.
The integers x and the mixing beta parametrize the whole solution family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .operators import HermitianOperator
from .targets import TargetTransform, phase_from_turns

__all__ = [
    "PlanError",
    "SpectralPlan",
    "random_plan",
    "synthesize",
    "synthesize_with_energies",
    "VerificationReport",
    "verify_pst",
    "focusing_parameters",
    "effective_focusing_hamiltonian",
]

BETA_UNITARITY_ATOL = 1e-10


class PlanError(ValueError):
    """Raised when a spectral plan does not cover or fit its target."""


def principal_angle(turns: Fraction) -> float:
    """arg(exp(2 pi i turns)) in (-pi, pi], computed from the exact phase."""
    t = turns % 1
    if t <= Fraction(1, 2):
        return 2.0 * math.pi * float(t)
    return 2.0 * math.pi * float(t - 1)


@dataclass
class SpectralPlan:
    """Integer phase choices and degenerate-mixing coefficients.

    ``x`` maps an eigenvalue (as exact turns of a full circle) to one integer
    per degeneracy slot.  ``beta`` optionally maps an eigenvalue to a unitary
    mixing matrix whose rows give the synthesized eigenbasis in terms of the
    per-cycle eigenvectors; omitted eigenvalues use the identity.
    """

    tau: float
    x: dict[Fraction, tuple[int, ...]]
    beta: dict[Fraction, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise PlanError(f"transfer time must be positive, got {self.tau}")
        self.x = {Fraction(k) % 1: tuple(int(i) for i in v) for k, v in self.x.items()}
        self.beta = {Fraction(k) % 1: np.asarray(b, dtype=complex)
                     for k, b in self.beta.items()}

    @classmethod
    def zero(cls, target: TargetTransform, tau: float) -> "SpectralPlan":
        """The x = 0 member of the family (smallest |energies|)."""
        x = {turns: (0,) * len(vecs) for turns, vecs in target.spectral_components()}
        return cls(tau=tau, x=x)


def random_plan(
    target: TargetTransform,
    tau: float,
    rng: np.random.Generator,
    x_range: tuple[int, int] = (-3, 3),
) -> SpectralPlan:
    """Random integers x and Haar-ish random unitary beta per eigenvalue."""
    x: dict[Fraction, tuple[int, ...]] = {}
    beta: dict[Fraction, np.ndarray] = {}
    for turns, vecs in target.spectral_components():
        eta = len(vecs)
        x[turns] = tuple(int(v) for v in rng.integers(x_range[0], x_range[1] + 1, eta))
        gaussian = rng.normal(size=(eta, eta)) + 1j * rng.normal(size=(eta, eta))
        q, r = np.linalg.qr(gaussian)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        beta[turns] = q
    return SpectralPlan(tau=tau, x=x, beta=beta)


def _check_beta(beta: np.ndarray, eta: int, turns: Fraction) -> None:
    if beta.shape != (eta, eta):
        raise PlanError(
            f"beta for eigenvalue turns {turns} must be {eta}x{eta}, got {beta.shape}")
    deviation = np.max(np.abs(beta @ beta.conj().T - np.eye(eta)))
    if deviation > BETA_UNITARITY_ATOL:
        raise PlanError(
            f"beta for eigenvalue turns {turns} is not unitary "
            f"(max deviation {deviation:.3e})")


def synthesize(target: TargetTransform, plan: SpectralPlan) -> HermitianOperator:
    """Build one member of the transfer-Hamiltonian family for the target.

    The plan must supply an integer x for every (eigenvalue, degeneracy slot)
    of the target's spectrum; exp(-iH tau) then equals the completed target
    unitary exactly.
    """
    components = target.spectral_components()
    ham = np.zeros((target.dim, target.dim), dtype=complex)
    for turns, vecs in components:
        eta = len(vecs)
        if turns not in plan.x:
            raise PlanError(f"plan lacks x values for eigenvalue turns {turns}")
        xs = plan.x[turns]
        if len(xs) != eta:
            raise PlanError(
                f"eigenvalue turns {turns} has degeneracy {eta}, plan gives {len(xs)}")
        beta = plan.beta.get(turns)
        if beta is None:
            mixed = vecs
        else:
            _check_beta(beta, eta, turns)
            stack = np.array(vecs)  # rows are the per-cycle eigenvectors
            mixed = list(beta @ stack)
        angle = principal_angle(turns)
        for x_val, vec in zip(xs, mixed):
            energy = -angle + 2.0 * math.pi * x_val
            if energy != 0.0:
                ham += (energy / plan.tau) * np.outer(vec, vec.conj())
    return HermitianOperator(ham)


def synthesize_with_energies(
    target: TargetTransform,
    energies: list[float],
    tau: float,
    atol: float = 1e-9,
) -> tuple[HermitianOperator, float]:
    """Assign prescribed energies to eigenvalue sectors and build H.

    Each energy e must satisfy exp(-i e tau) = exp(i phi) * lambda for a
    single global phase phi shared by all sectors; within a sector, energies
    are assigned in ascending order.  Returns (H, phi) with
    exp(-iH tau) = exp(i phi) * target.
    """
    components = target.spectral_components()
    dim_needed = sum(len(vecs) for _, vecs in components)
    if len(energies) != dim_needed:
        raise PlanError(
            f"need {dim_needed} energies for the target spectrum, got {len(energies)}")
    energies = sorted(float(e) for e in energies)
    phases = [(-e * tau) % (2.0 * math.pi) for e in energies]

    # candidate global phases: align the first energy with each sector
    for turns0, _ in components:
        phi = (phases[0] - 2.0 * math.pi * float(turns0)) % (2.0 * math.pi)
        assignment: dict[Fraction, list[float]] = {t: [] for t, _ in components}
        ok = True
        for e, ph in zip(energies, phases):
            matched = False
            for turns, vecs in components:
                want = (phi + 2.0 * math.pi * float(turns)) % (2.0 * math.pi)
                delta = abs((ph - want + math.pi) % (2.0 * math.pi) - math.pi)
                if delta <= atol and len(assignment[turns]) < len(vecs):
                    assignment[turns].append(e)
                    matched = True
                    break
            if not matched:
                ok = False
                break
        if not ok:
            continue
        ham = np.zeros((target.dim, target.dim), dtype=complex)
        for turns, vecs in components:
            for e, vec in zip(assignment[turns], vecs):
                ham += e * np.outer(vec, vec.conj())
        phi_principal = (phi + math.pi) % (2.0 * math.pi) - math.pi
        return HermitianOperator(ham), phi_principal
    raise PlanError(
        "prescribed energies are not compatible with the target spectrum "
        "under any common global phase")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking exp(-iH tau) against a target."""

    operator_distance: float
    global_phase: float
    fidelities: dict[str, float]

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelities.values()) if self.fidelities else float("nan")

    def to_json(self) -> dict:
        return {
            "operator_distance": self.operator_distance,
            "global_phase": self.global_phase,
            "fidelities": dict(self.fidelities),
        }


def verify_pst(
    ham: HermitianOperator,
    target: TargetTransform,
    tau: float,
) -> VerificationReport:
    """Distance of exp(-iH tau) to the target, minimized over a global phase.

    The distance is the Frobenius norm over the target's support (support
    columns for a permutation, source/target pair span for a partial
    isometry); the optimal phase is arg tr(P^dag U) on that support.
    Fidelities are |<target_s | U | s>|^2 per support state or pair.
    """
    if ham.dim != target.dim:
        raise ValueError(f"dimension mismatch: H is {ham.dim}, target is {target.dim}")
    propagated = ham.propagator(tau)
    tmat = target.matrix()
    fidelities: dict[str, float] = {}
    if target.kind == "permutation":
        cols = list(target.support)
        diff_u = propagated[:, cols]
        diff_t = tmat[:, cols]
        for idx in cols:
            fidelities[str(idx)] = float(abs(propagated[target.mapping[idx], idx]) ** 2)
    else:
        sources = np.array([s for s, _ in target.pairs]).T
        targets_ = np.array([t for _, t in target.pairs]).T
        span = np.concatenate([sources, targets_], axis=1)
        diff_u = propagated @ span
        diff_t = tmat @ span
        for k, (s, t) in enumerate(target.pairs):
            fidelities[f"pair{k}"] = float(abs(np.vdot(t, propagated @ s)) ** 2)
    overlap = np.vdot(diff_t, diff_u)
    phase = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    distance = float(np.linalg.norm(diff_u - np.exp(1j * phase) * diff_t))
    return VerificationReport(operator_distance=distance, global_phase=phase,
                              fidelities=fidelities)


def focusing_parameters(x_plus: int, x_minus: int, tau: float) -> tuple[float, float]:
    """Diagonal energy and bright-state coupling of the focusing Hamiltonian.

    delta_plus = 2 x_+ + (2 x_- - 1) and delta_minus = 2 x_+ - (2 x_- - 1);
    the returned pair is (pi delta_plus / (4 tau), pi delta_minus / (2 tau)).
    delta_minus is odd for every integer choice, which is what makes the
    transfer probability sin^2(coupling * tau) equal one exactly.
    """
    delta_plus = 2 * x_plus + (2 * x_minus - 1)
    delta_minus = 2 * x_plus - (2 * x_minus - 1)
    return (math.pi * delta_plus / (4.0 * tau),
            math.pi * delta_minus / (2.0 * tau))


def effective_focusing_hamiltonian(
    x_plus: int,
    x_minus: int,
    tau: float,
    variant: str = "spin_pair",
) -> HermitianOperator:
    """Effective Hamiltonian focusing two excitations onto one site (or back).

    boson_pair: basis {|2,mu;2,mu>, |1,mu;3,mu>}; the two states swap at tau.

    spin_pair: basis {|2,up;2,dn>, |1,up;3,dn>, |1,dn;3,up>}; the doubly
    occupied state transfers onto the symmetric (bright) combination of the
    separated states at tau, while the antisymmetric (dark) combination only
    accumulates the phase exp(-i E22 tau).

    Coupling convention: the printed effective form couples the doubly
    occupied state to EACH separated state with strength J2, which makes the
    bright-state coupling sqrt(2) * J2 and spoils the exact transfer
    (sin(sqrt(2) pi delta_minus / 2) != 1 for odd delta_minus).  A 2x2
    reduction onto {doubly occupied, bright} shows the transfer probability
    is sin^2(g tau) with g the bright-state coupling, so J2 is taken as the
    coupling to the normalized bright state: each separated state couples
    with J2 / sqrt(2).
    """
    e22, j2 = focusing_parameters(x_plus, x_minus, tau)
    if variant == "boson_pair":
        ham = np.array([[e22, j2], [j2, e22]], dtype=complex)
    elif variant == "spin_pair":
        g = j2 / math.sqrt(2.0)
        ham = np.array(
            [[e22, g, g],
             [g, e22, 0.0],
             [g, 0.0, e22]],
            dtype=complex,
        )
    else:
        raise ValueError(f"unknown focusing variant {variant!r}")
    return HermitianOperator(ham)
