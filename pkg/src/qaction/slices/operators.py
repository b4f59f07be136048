"""Hamiltonians, propagators and bases on a single slice."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import scipy.linalg

from qaction.errors import InvalidPotentialError, NumericalError
from qaction.slices.space import SliceOperator, SliceSpace, grid_momenta

Potential = Callable[[np.ndarray], np.ndarray | float]


def identity(space: SliceSpace) -> SliceOperator:
    return SliceOperator(space, np.eye(space.dim), "1", "unitary")


def centered_dft_matrix(dim: int, spacing: float = 1.0, q_min: float | None = None) -> np.ndarray:
    """Columns are grid plane waves <q_j|p_k> = exp(i p_k q_j) / sqrt(M)."""
    origin = -(dim // 2) * spacing if q_min is None else q_min
    q = origin + spacing * np.arange(dim, dtype=float)
    p = grid_momenta(dim, spacing)
    return np.exp(1j * np.outer(q, p)) / math.sqrt(dim)


def dft_momentum_basis(space: SliceSpace) -> SliceOperator:
    space.require_grid("dft_momentum_basis")
    matrix = centered_dft_matrix(space.dim, space.spacing, space.q_min)
    return SliceOperator(space, matrix, "F", "unitary")


def kinetic_operator(space: SliceSpace, mass: float = 1.0) -> SliceOperator:
    """Exact periodic p^2/2m, diagonal in the DFT momentum basis."""
    space.require_grid("kinetic_operator")
    fourier = dft_momentum_basis(space).matrix
    p = space.grid_momenta()
    matrix = fourier @ np.diag(p**2 / (2.0 * mass)) @ fourier.conj().T
    return SliceOperator(space, _hermitize(matrix), "K", "hermitian")


def potential_operator(space: SliceSpace, potential: Potential) -> SliceOperator:
    space.require_grid("potential_operator")
    q = space.grid_points()
    values = np.broadcast_to(np.asarray(potential(q), dtype=complex), q.shape)
    if not np.all(np.isfinite(values)):
        bad = [float(x) for x in q[~np.isfinite(values)]]
        raise InvalidPotentialError(f"potential is not finite at grid points {bad}")
    if np.any(np.abs(values.imag) > 0):
        raise InvalidPotentialError("potential must be real on the grid")
    return SliceOperator(space, np.diag(values.real), "V", "hermitian")


def build_hamiltonian(space: SliceSpace, potential: Potential, mass: float = 1.0) -> SliceOperator:
    """H = p^2/2m + V(q) on a periodic grid."""
    kinetic = kinetic_operator(space, mass)
    pot = potential_operator(space, potential)
    return SliceOperator(space, _hermitize(kinetic.matrix + pot.matrix), "H", "hermitian")


def propagator_step(hamiltonian: SliceOperator, dt: complex) -> SliceOperator:
    """exp(-i H dt) through a Hermitian eigendecomposition.

    A complex ``dt`` (e.g. ``-1j * beta / N``) gives the Wick-rotated step,
    which is no longer unitary.
    """
    try:
        energies, vectors = scipy.linalg.eigh(hamiltonian.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            f"eigendecomposition of {hamiltonian.label or 'H'} failed",
            condition=_condition_report(hamiltonian.matrix),
        ) from exc
    phases = np.exp(-1j * energies * complex(dt))
    matrix = (vectors * phases) @ vectors.conj().T
    kind = "unitary" if complex(dt).imag == 0 else "general"
    return SliceOperator(hamiltonian.space, matrix, f"U({dt})", kind)


def eigenbasis(hamiltonian: SliceOperator) -> SliceOperator:
    """Unitary whose columns are the eigenvectors of H, ascending energy."""
    _, vectors = scipy.linalg.eigh(hamiltonian.matrix)
    return SliceOperator(hamiltonian.space, vectors, f"eig({hamiltonian.label})", "unitary")


def position_operator(space: SliceSpace) -> SliceOperator:
    if space.is_grid:
        return SliceOperator(space, np.diag(space.grid_points()), "q", "hermitian")
    a = annihilation(space).matrix
    matrix = (a + a.conj().T) / math.sqrt(2.0 * space.mass * space.omega)
    return SliceOperator(space, matrix, "q", "hermitian")


def momentum_operator(space: SliceSpace) -> SliceOperator:
    if space.is_grid:
        fourier = dft_momentum_basis(space).matrix
        matrix = fourier @ np.diag(space.grid_momenta()) @ fourier.conj().T
        return SliceOperator(space, _hermitize(matrix), "p", "hermitian")
    a = annihilation(space).matrix
    matrix = 1j * math.sqrt(space.mass * space.omega / 2.0) * (a.conj().T - a)
    return SliceOperator(space, matrix, "p", "hermitian")


def annihilation(space: SliceSpace) -> SliceOperator:
    space.require_fock("annihilation")
    matrix = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), k=1)
    return SliceOperator(space, matrix, "a")


def creation(space: SliceSpace) -> SliceOperator:
    return annihilation(space).dagger("a^dag")


def harmonic_hamiltonian(space: SliceSpace) -> SliceOperator:
    """omega (n + 1/2), exactly diagonal in the truncated Fock basis."""
    space.require_fock("harmonic_hamiltonian")
    levels = space.omega * (np.arange(space.dim, dtype=float) + 0.5)
    return SliceOperator(space, np.diag(levels), "H", "hermitian")


def harmonic_potential(mass: float, omega: float) -> Potential:
    def potential(q: np.ndarray) -> np.ndarray:
        return 0.5 * mass * omega**2 * q**2

    return potential


def random_hermitian(space: SliceSpace, rng: np.random.Generator) -> SliceOperator:
    """A + A^dag with entries of A uniform on the complex unit square."""
    a = rng.random((space.dim, space.dim)) + 1j * rng.random((space.dim, space.dim))
    return SliceOperator(space, a + a.conj().T, "H_rand", "hermitian")


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def _condition_report(matrix: np.ndarray) -> str:
    finite = bool(np.all(np.isfinite(matrix)))
    if not finite:
        return "matrix has non-finite entries"
    try:
        cond = float(np.linalg.cond(matrix))
    except np.linalg.LinAlgError:
        return "condition number unavailable"
    return f"cond={cond:.3e}"
