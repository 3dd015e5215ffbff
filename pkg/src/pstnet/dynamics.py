"""Time evolution, transfer fidelities, and occupation/leakage traces.

Propagation is purely spectral (exact for time-independent Hamiltonians):
psi(t) = sum_k exp(-i E_k t) |k><k|psi0>.  Grid evaluations only reuse the
cached decomposition, so sweeping a time grid is cheap and each grid point is
independent of the others.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .fock import Basis
from .operators import HermitianOperator

__all__ = [
    "NORM_ATOL",
    "evolve",
    "transfer_fidelity",
    "occupation_probabilities",
    "TimeSeries",
    "time_grid",
    "trace_probabilities",
    "occupation_trace",
    "subspace_leakage",
]

NORM_ATOL = 1e-10
CSV_FORMAT = "%.9g"  # nine significant digits, locale independent


def _require_normalized(state: np.ndarray, name: str) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > NORM_ATOL:
        raise ValueError(f"{name} must be normalized, |norm - 1| = {abs(norm - 1):.3e}")
    return state


def evolve(ham: HermitianOperator, state: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt) applied to a normalized state."""
    state = _require_normalized(state, "initial state")
    if state.shape != (ham.dim,):
        raise ValueError(f"state has shape {state.shape}, H has dimension {ham.dim}")
    return ham.apply_propagator(state, t)


def transfer_fidelity(
    ham: HermitianOperator,
    state: np.ndarray,
    target: np.ndarray,
    tau: float,
) -> float:
    """|<target | exp(-iH tau) | state>|^2."""
    target = _require_normalized(target, "target state")
    return float(abs(np.vdot(target, evolve(ham, state, tau))) ** 2)


def occupation_probabilities(state: np.ndarray, basis: Basis) -> dict[int, float]:
    """Expected excitation number per site; sums to N for any state.

    In a hard-core sector this equals the probability of finding an
    excitation at the site.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (basis.dim,):
        raise ValueError(f"state has shape {state.shape}, basis dimension {basis.dim}")
    weights = np.abs(state) ** 2
    totals = {site: 0.0 for site in range(1, basis.spec.sites + 1)}
    for amplitude2, basis_state in zip(weights, basis.states):
        if amplitude2 == 0.0:
            continue
        for site, count in basis_state.site_totals().items():
            totals[site] += amplitude2 * count
    return totals


@dataclass
class TimeSeries:
    """Sampled series over a common time grid, ready for CSV/JSON export."""

    times: np.ndarray
    series: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        for label, values in self.series.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.times.shape:
                raise ValueError(f"series {label!r} does not match the time grid")
            self.series[label] = values

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.series)

    def value_at(self, label: str, t: float, atol: float = 1e-12) -> float:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > atol:
            raise KeyError(f"time {t} is not on the grid")
        return float(self.series[label][idx])

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(["t", *self.labels]) + "\n")
        columns = [self.times, *(self.series[label] for label in self.labels)]
        for row in zip(*columns):
            out.write(",".join(CSV_FORMAT % value for value in row) + "\n")
        return out.getvalue()

    def to_json(self) -> dict:
        return {
            "t": [float(v) for v in self.times],
            "series": {label: [float(v) for v in values]
                       for label, values in self.series.items()},
        }

    def write(self, path: str, fmt: str = "csv") -> None:
        with open(path, "w", encoding="utf-8") as fh:
            if fmt == "csv":
                fh.write(self.to_csv())
            else:
                json.dump(self.to_json(), fh, indent=2)
                fh.write("\n")


def time_grid(t_end: float, points: int, t_start: float = 0.0) -> np.ndarray:
    """Uniform grid with ``points`` samples; a single point sits at t_end."""
    if points < 1:
        raise ValueError("time grid needs at least one point")
    if points == 1:
        return np.array([t_end], dtype=float)
    return np.linspace(t_start, t_end, points)


def _amplitude_table(
    ham: HermitianOperator,
    state: np.ndarray,
    grid: np.ndarray,
) -> np.ndarray:
    """psi(t) for every grid time; one column per time."""
    energies, modes = ham.spectral()
    coeffs = modes.conj().T @ state
    phases = np.exp(-1j * np.outer(energies, grid))
    return modes @ (phases * coeffs[:, None])


def trace_probabilities(
    ham: HermitianOperator,
    state: np.ndarray,
    targets: dict[str, np.ndarray],
    grid: np.ndarray,
) -> TimeSeries:
    """|<target | psi(t)>|^2 for each labeled target over the grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("time grid is empty")
    state = _require_normalized(state, "initial state")
    table = _amplitude_table(ham, state, grid)
    series = {}
    for label, tvec in targets.items():
        tvec = _require_normalized(tvec, f"target {label!r}")
        series[label] = np.abs(tvec.conj() @ table) ** 2
    return TimeSeries(times=grid, series=series)


def occupation_trace(
    ham: HermitianOperator,
    state: np.ndarray,
    basis: Basis,
    grid: np.ndarray,
    sites: list[int] | None = None,
) -> TimeSeries:
    """Per-site expected occupation over time (the node-population picture)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("time grid is empty")
    state = _require_normalized(state, "initial state")
    table = np.abs(_amplitude_table(ham, state, grid)) ** 2
    wanted = sites if sites is not None else list(range(1, basis.spec.sites + 1))
    counts = np.zeros((len(wanted), basis.dim))
    site_pos = {site: k for k, site in enumerate(wanted)}
    for col, basis_state in enumerate(basis.states):
        for site, count in basis_state.site_totals().items():
            if site in site_pos:
                counts[site_pos[site], col] = count
    values = counts @ table
    series = {f"site_{site}": values[k] for k, site in enumerate(wanted)}
    return TimeSeries(times=grid, series=series)


def subspace_leakage(
    ham: HermitianOperator,
    state: np.ndarray,
    indices: list[int],
    grid: np.ndarray,
) -> TimeSeries:
    """1 - (probability mass inside the index set) along the evolution."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("time grid is empty")
    state = _require_normalized(state, "initial state")
    table = np.abs(_amplitude_table(ham, state, grid)) ** 2
    inside = table[list(indices), :].sum(axis=0)
    return TimeSeries(times=grid, series={"leakage": 1.0 - inside})
