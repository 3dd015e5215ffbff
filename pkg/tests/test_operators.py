import numpy as np
import pytest

from pstnet.operators import ConvergenceError, HermitianOperator, jacobi_eigh

import sq_oracle


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8, 12, 16])
def test_jacobi_matches_lapack(dim):
    rng = np.random.default_rng(dim)
    h = random_hermitian(rng, dim)
    eigs, vecs = jacobi_eigh(h)
    reference = np.linalg.eigvalsh(h)
    assert np.max(np.abs(eigs - reference)) < 1e-11
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(dim))) < 1e-12
    assert np.max(np.abs((vecs * eigs) @ vecs.conj().T - h)) < 1e-11


def test_jacobi_diagonal_and_zero():
    eigs, vecs = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(eigs, [-1.0, 2.0, 3.0])
    eigs, vecs = jacobi_eigh(np.zeros((4, 4)))
    assert np.allclose(eigs, 0.0)
    assert np.allclose(vecs, np.eye(4))


def test_jacobi_degenerate_spectrum():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    h = (q * np.array([1.0, 1.0, 1.0, -2.0, -2.0, 7.0])) @ q.conj().T
    eigs, vecs = jacobi_eigh(h)
    assert np.max(np.abs((vecs * eigs) @ vecs.conj().T - h)) < 1e-12


def test_jacobi_sweep_cap_is_hard_error():
    h = random_hermitian(np.random.default_rng(0), 4)
    with pytest.raises(ConvergenceError):
        jacobi_eigh(h, max_sweeps=0)


def test_hermiticity_is_enforced():
    with pytest.raises(ValueError):
        HermitianOperator(np.array([[0.0, 1.0], [0.5, 0.0]]))
    # tiny asymmetry within tolerance is symmetrized away
    op = HermitianOperator(np.array([[0.0, 1.0], [1.0 + 1e-14, 0.0]]))
    assert np.max(np.abs(op.matrix - op.matrix.conj().T)) == 0.0


def test_spectral_reconstruction_tolerance():
    rng = np.random.default_rng(9)
    for dim in (2, 6, 10):
        op = HermitianOperator(random_hermitian(rng, dim))
        eigs, vecs = op.spectral()
        assert np.max(np.abs((vecs * eigs) @ vecs.conj().T - op.matrix)) < 1e-10


def test_propagator_against_series_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        h = random_hermitian(rng, 8)
        t = float(rng.uniform(0.1, 2.0))
        op = HermitianOperator(h)
        spectral = op.propagator(t)
        series = sq_oracle.series_propagator(h, t)
        pade = sq_oracle.pade_propagator(h, t)
        assert np.max(np.abs(spectral - series)) < 1e-9
        assert np.max(np.abs(series - pade)) < 1e-9  # the two oracles agree too


def test_propagator_unitarity():
    rng = np.random.default_rng(13)
    op = HermitianOperator(random_hermitian(rng, 7))
    u = op.propagator(1.7)
    assert np.max(np.abs(u @ u.conj().T - np.eye(7))) < 1e-12


def test_json_round_trip():
    rng = np.random.default_rng(17)
    op = HermitianOperator(random_hermitian(rng, 5))
    clone = HermitianOperator.from_json(op.to_json())
    assert np.allclose(clone.matrix, op.matrix)
    with pytest.raises(ValueError):
        HermitianOperator.from_json({"dimension": 2, "entries": [[0.0, 0.0]]})
