"""Independent oracles the test suite checks the package against.

These deliberately take different routes than the library:

* ``operator_hamiltonian`` builds per-slot creation/annihilation operator
  matrices over the full truncated Fock space and assembles the Hamiltonian
  from operator products, then projects onto the enumerated sector.  The
  library instead hops configurations directly.
* ``series_propagator`` is a scaling-and-squaring Taylor series for
  exp(-iHt).  The library propagates spectrally.
* ``two_particle_amplitude`` evolves two noncrossing excitations as a Slater
  determinant of single-particle amplitudes.  The library evolves the
  restricted block matrix.

Slot ordering convention (shared with the library): slots are (site, label)
tuples ordered by site, then label string; fermionic signs count occupied
slots below the moved one in that order.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from pstnet.fock import Basis
from pstnet.lattice import ModelParams


def _slot_list(basis: Basis) -> list[tuple[int, str]]:
    spec = basis.spec
    return sorted((site, label)
                  for site in range(1, spec.sites + 1)
                  for label in spec.labels)


def _fock_space(slots, cap: int, total: int):
    """All occupation vectors with per-slot cap and given total."""
    states = []

    def extend(prefix, remaining):
        if len(prefix) == len(slots):
            if remaining == 0:
                states.append(tuple(prefix))
            return
        for n in range(min(cap, remaining) + 1):
            extend(prefix + [n], remaining - n)

    extend([], total)
    return states


def _ladder_matrices(states, slot_pos: int, cap: int, fermion: bool):
    """(creation, annihilation) matrices for one slot over the listed states."""
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)
    create = np.zeros((dim, dim))
    for i, occ in enumerate(states):
        n = occ[slot_pos]
        if n + 1 > cap:
            continue
        raised = list(occ)
        raised[slot_pos] = n + 1
        j = index.get(tuple(raised))
        if j is None:
            continue
        if fermion:
            sign = (-1) ** sum(occ[:slot_pos])
            create[j, i] = sign
        else:
            create[j, i] = math.sqrt(n + 1)
    return create, create.T


def operator_hamiltonian(params: ModelParams, basis: Basis) -> np.ndarray:
    """Second-quantized operator-matrix route to the sector Hamiltonian."""
    spec = basis.spec
    slots = _slot_list(basis)
    fermion = spec.statistics == "fermion"
    cap = 1 if fermion else spec.excitations
    states = _fock_space(slots, cap, spec.excitations)
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)

    create = {}
    annihilate = {}
    for pos, slot in enumerate(slots):
        c, a = _ladder_matrices(states, pos, cap, fermion)
        create[slot] = c
        annihilate[slot] = a
    number = {slot: create[slot] @ annihilate[slot] for slot in slots}

    ham = np.zeros((dim, dim))
    for slot in slots:
        ham += params.eps(*slot) * number[slot]
    for slot_a in slots:
        for slot_b in slots:
            u = params.interaction(slot_a[0], slot_a[1], slot_b[0], slot_b[1])
            if u == 0.0:
                continue
            na, nb = number[slot_a], number[slot_b]
            if slot_a == slot_b:
                ham += 0.5 * u * (na @ na - na)
            else:
                ham += 0.5 * u * (na @ nb)
    for (i, k), j in params.couplings.items():
        if j == 0.0:
            continue
        for label in spec.labels:
            hop = create[(i, label)] @ annihilate[(k, label)]
            ham += j * (hop + hop.T)

    # project onto the enumerated sector (drops e.g. hard-core-excluded rows)
    def occupation_vector(state) -> tuple[int, ...]:
        occ = state.occupations
        return tuple(occ.get(slot, 0) for slot in slots)

    sector = [index[occupation_vector(s)] for s in basis.states]
    return ham[np.ix_(sector, sector)]


def series_propagator(hmat: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt) by scaling and squaring a Taylor series."""
    a = -1j * np.asarray(hmat, dtype=complex) * t
    norm = np.linalg.norm(a)
    squarings = max(0, int(math.ceil(math.log2(norm)))) if norm > 1 else 0
    a = a / (2 ** squarings)
    dim = a.shape[0]
    result = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for order in range(1, 40):
        term = term @ a / order
        result = result + term
        if np.linalg.norm(term) < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def pade_propagator(hmat: np.ndarray, t: float) -> np.ndarray:
    """Third route: scipy's Pade expm."""
    return scipy.linalg.expm(-1j * np.asarray(hmat, dtype=complex) * t)


def two_particle_amplitude(
    single_hamiltonian: np.ndarray,
    t: float,
    source: tuple[int, int],
    destination: tuple[int, int],
) -> complex:
    """Slater-determinant amplitude for two noncrossing excitations.

    ``source`` and ``destination`` are 1-based ordered site pairs; the block
    dynamics of two hard-core excitations with nearest-neighbor hopping
    matches free fermions, whose two-particle amplitudes are determinants of
    single-particle ones.
    """
    u = pade_propagator(single_hamiltonian, t)
    (s1, s2), (d1, d2) = source, destination
    block = np.array([
        [u[d1 - 1, s1 - 1], u[d1 - 1, s2 - 1]],
        [u[d2 - 1, s1 - 1], u[d2 - 1, s2 - 1]],
    ])
    return complex(np.linalg.det(block))
