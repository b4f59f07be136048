"""Fourier modes of the time-shift generator and the determinant identities they give."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from qaction.errors import DimensionMismatchError, SingularConfigurationError
from qaction.extended.action import ActionSpec, dense_action_matrix, dense_slicewise_matrix
from qaction.slices.operators import creation, harmonic_hamiltonian
from qaction.slices.space import SliceSpace, momentum_labels

POLE_TOL = 1e-8
RESONANCE_RADIUS = 1e-6
SINGULAR_DET_TOL = 1e-12


@dataclass(frozen=True)
class ModeSpectrum:
    """Mode labels n and frequencies omega_n = 2 pi n / T."""

    total_time: float
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise DimensionMismatchError(f"total_time must be > 0, got {self.total_time!r}")

    @classmethod
    def grid(cls, n_slices: int, total_time: float) -> ModeSpectrum:
        """The N modes resolved by N slices, n in {-floor(N/2), ..., floor((N-1)/2)}."""
        if n_slices < 1:
            raise DimensionMismatchError("n_slices must be >= 1")
        return cls(total_time, tuple(int(n) for n in momentum_labels(n_slices)))

    @classmethod
    def symmetric(cls, cutoff: int, total_time: float) -> ModeSpectrum:
        return cls(total_time, tuple(range(-cutoff, cutoff + 1)))

    @property
    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * np.asarray(self.labels, dtype=float) / self.total_time

    def to_dict(self) -> dict:
        return {"total_time": self.total_time, "n_modes": len(self.labels)}


@dataclass(frozen=True, eq=False)
class OneBodyMatrix:
    """N x N matrix acting on the creation-operator labels A^dag_t."""

    matrix: np.ndarray
    origin: str

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def det(self) -> complex:
        if self.size == 0:
            return 1.0 + 0.0j
        return complex(np.linalg.det(self.matrix))

    def reduced(self) -> OneBodyMatrix:
        """Drop the first row and column."""
        return OneBodyMatrix(self.matrix[1:, 1:], "reduced")


def check_pole(omega: float, total_time: complex) -> None:
    if abs(cmath.sin(omega * total_time / 2.0)) < POLE_TOL:
        raise SingularConfigurationError(
            f"omega*T = {omega * total_time} is within {POLE_TOL} of a pole 2*pi*k"
        )


def closed_form_partition(omega: float, total_time: float) -> complex:
    """1 / (2i sin(omega T / 2))."""
    check_pole(omega, total_time)
    return 1.0 / (2j * math.sin(omega * total_time / 2.0))


def mode_factors(
    n_slices: int, epsilon: complex, omega: float, tau: complex | None = None
) -> np.ndarray:
    """1 - e^{i tau (omega_n - omega)} over the N grid modes.

    tau omega_n = 2 pi n tau / (N eps), so a Wick-rotated eps = -i beta / N works too.
    """
    if n_slices < 1:
        raise DimensionMismatchError("n_slices must be >= 1")
    tau = epsilon if tau is None else tau
    turns = 2.0 * np.pi * momentum_labels(n_slices) / n_slices
    return 1.0 - np.exp(1j * (turns * (tau / epsilon) - tau * omega))


def mode_partition_product(n_slices: int, epsilon: complex, omega: float) -> complex:
    """e^{-i omega T/2} prod_n (1 - e^{i eps (omega_n - omega)})^{-1}; exact for every N."""
    total = n_slices * epsilon
    check_pole(omega, total)
    log_product = np.sum(np.log(mode_factors(n_slices, epsilon, omega)))
    return complex(np.exp(-1j * omega * total / 2.0 - log_product))


def time_site_dft(n_slices: int) -> np.ndarray:
    """F[n, t] = e^{i omega_n t eps} / sqrt(N); independent of eps."""
    labels = momentum_labels(n_slices)
    t = np.arange(n_slices)
    return np.exp(2j * np.pi * np.outer(labels, t) / n_slices) / math.sqrt(n_slices)


def mixing_matrix(
    n_slices: int, epsilon: float, omega: float, tau: float | None = None
) -> OneBodyMatrix:
    """M(tau) = 1 - F^dag diag(e^{i tau (omega_n - omega)}) F.

    At tau = eps this is 1 - e^{-i omega eps} C with C the cyclic shift
    C[t+1, t] = 1.
    """
    fourier = time_site_dft(n_slices)
    phases = 1.0 - mode_factors(n_slices, epsilon, omega, tau)
    matrix = np.eye(n_slices) - fourier.conj().T @ np.diag(phases) @ fourier
    return OneBodyMatrix(matrix, "mixing")


def vacuum_persistence_det(n_slices: int, epsilon: float, omega: float) -> complex:
    """e^{-i omega T/2} / det(reduced M(eps))."""
    if n_slices < 2:
        raise DimensionMismatchError("the reduced mixing matrix needs n_slices >= 2")
    det = mixing_matrix(n_slices, epsilon, omega).reduced().det()
    if abs(det) < SINGULAR_DET_TOL:
        raise SingularConfigurationError(f"reduced mixing matrix is singular (det={det})")
    return complex(np.exp(-1j * omega * n_slices * epsilon / 2.0) / det)


def mixing_identity_residual(
    n_slices: int, fock_dim: int, omega: float, epsilon: float, max_states: int = 4096
) -> float:
    """max_t || A^dag_t - e^{iS} A^dag_t e^{-iS} - sum_t' M[t', t] A^dag_t' ||_max.

    Evaluated with dense matrices on N copies of a truncated Fock space.
    """
    space = SliceSpace.fock(fock_dim, omega=omega)
    spec = ActionSpec.from_hamiltonian(harmonic_hamiltonian(space), n_slices, epsilon)
    action = dense_action_matrix(spec, max_states)
    eye = np.eye(fock_dim, dtype=complex)
    a_dag = creation(space).matrix
    lifted = [
        dense_slicewise_matrix([a_dag if s == t else eye for s in range(n_slices)])
        for t in range(n_slices)
    ]
    mixing = mixing_matrix(n_slices, epsilon, omega).matrix
    worst = 0.0
    for t in range(n_slices):
        lhs = lifted[t] - action @ lifted[t] @ action.conj().T
        rhs = sum(mixing[s, t] * lifted[s] for s in range(n_slices))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
