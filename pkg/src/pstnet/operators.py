"""Dense Hermitian operators with a cached spectral decomposition.

The eigensolver is a cyclic Jacobi iteration for complex Hermitian matrices:
each sweep annihilates every off-diagonal element once with a unitary 2x2
rotation.  Convergence is quadratic, which is plenty for the desk-scale
matrices (dimension <= a few hundred) this package works with.
"""

from __future__ import annotations

import math
import threading

import numpy as np

__all__ = ["ConvergenceError", "jacobi_eigh", "HermitianOperator"]

HERMITICITY_ATOL = 1e-12


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi iteration fails to reach its threshold."""


def _offdiagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigenvalues and orthonormal eigenvectors of a complex Hermitian matrix.

    Cyclic sweeps over the upper triangle; stops once the off-diagonal
    Frobenius norm drops below ``tol`` relative to the matrix norm.  Raises
    ConvergenceError after ``max_sweeps`` sweeps (in practice < 10 suffice).

    Returns ``(eigenvalues, eigenvectors)`` sorted ascending, with
    eigenvectors in the columns.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = float(np.linalg.norm(a))
    v = np.eye(n, dtype=complex)
    if n == 1 or scale == 0.0:
        return np.diag(a).real.copy(), v

    threshold = tol * scale
    for _ in range(max_sweeps):
        if _offdiagonal_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # phase that makes the 2x2 block real, then a real rotation
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # embedded unitary: columns (p, q) -> (p, q) @ u2
                u2 = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                a[:, [p, q]] = a[:, [p, q]] @ u2
                a[[p, q], :] = u2.conj().T @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ u2
    if _offdiagonal_norm(a) > threshold:
        raise ConvergenceError(
            f"Jacobi iteration did not reach {tol:g} within {max_sweeps} sweeps "
            f"(off-diagonal norm {_offdiagonal_norm(a):.3e}, scale {scale:.3e})")

    eigenvalues = np.diag(a).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


class HermitianOperator:
    """Immutable dense Hermitian matrix with a lazy spectral cache.

    The spectral decomposition is computed on first use under a lock, so
    instances can be shared across threads.  The propagator exp(-iHt) is
    assembled spectrally and is exact for time-independent H.
    """

    def __init__(self, matrix: np.ndarray, *, atol: float = HERMITICITY_ATOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if deviation > atol:
            raise ValueError(
                f"matrix is not Hermitian: max |H - H^dag| = {deviation:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._matrix = m
        self._lock = threading.Lock()
        self._spectral: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def spectral(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached ``(eigenvalues, eigenvectors)``, eigenvalues ascending."""
        if self._spectral is None:
            with self._lock:
                if self._spectral is None:
                    self._spectral = jacobi_eigh(self._matrix)
        return self._spectral

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral()[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectral()[1]

    def propagator(self, t: float) -> np.ndarray:
        """exp(-iHt) via the spectral decomposition."""
        energies, modes = self.spectral()
        return (modes * np.exp(-1j * energies * t)) @ modes.conj().T

    def apply_propagator(self, state: np.ndarray, t: float) -> np.ndarray:
        energies, modes = self.spectral()
        return modes @ (np.exp(-1j * energies * t) * (modes.conj().T @ state))

    def to_json(self) -> dict:
        return {
            "dimension": self.dim,
            "entries": [[float(z.real), float(z.imag)] for z in self._matrix.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HermitianOperator":
        dim = int(data["dimension"])
        entries = data["entries"]
        if len(entries) != dim * dim:
            raise ValueError(
                f"expected {dim * dim} entries for dimension {dim}, got {len(entries)}")
        flat = np.array([complex(re, im) for re, im in entries])
        return cls(flat.reshape(dim, dim))

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"
