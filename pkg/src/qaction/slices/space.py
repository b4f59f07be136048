"""Single-slice Hilbert spaces and the read-only operators that act on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qaction.errors import DimensionMismatchError

UNITARY_TOL = 1e-11
HERMITIAN_TOL = 1e-12


class SliceKind(str, Enum):
    POSITION_GRID = "position_grid"
    FOCK_TRUNCATION = "fock_truncation"


@dataclass(frozen=True)
class SliceSpace:
    """Single-time Hilbert space: a periodic position grid or a truncated Fock space.

    Grid points are ``q_j = q_min + j * spacing`` for ``j = 0..dim-1``. Fock
    spaces carry the oscillator mass and frequency that fix the ladder
    normalization ``q = (a + a^dag) / sqrt(2 m omega)``.
    """

    kind: SliceKind
    dim: int
    spacing: float = 1.0
    q_min: float = 0.0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 2:
            raise DimensionMismatchError(f"slice dim must be an int >= 2, got {self.dim!r}")
        for name in ("spacing", "q_min", "mass", "omega"):
            if not math.isfinite(float(getattr(self, name))):
                raise DimensionMismatchError(f"slice {name} must be finite")
        if self.kind is SliceKind.POSITION_GRID and self.spacing <= 0:
            raise DimensionMismatchError("grid spacing must be > 0")
        if self.kind is SliceKind.FOCK_TRUNCATION and (self.mass <= 0 or self.omega <= 0):
            raise DimensionMismatchError("fock mass and omega must be > 0")

    @classmethod
    def position_grid(
        cls, dim: int, spacing: float = 1.0, q_min: float | None = None
    ) -> SliceSpace:
        # Centered by default so that q = 0 is a grid point for even dim.
        origin = -(dim // 2) * spacing if q_min is None else q_min
        return cls(SliceKind.POSITION_GRID, dim, spacing=float(spacing), q_min=float(origin))

    @classmethod
    def fock(cls, dim: int, mass: float = 1.0, omega: float = 1.0) -> SliceSpace:
        return cls(SliceKind.FOCK_TRUNCATION, dim, mass=float(mass), omega=float(omega))

    @property
    def is_grid(self) -> bool:
        return self.kind is SliceKind.POSITION_GRID

    def require_grid(self, operation: str) -> None:
        if not self.is_grid:
            raise DimensionMismatchError(f"{operation} requires a position grid slice space")

    def require_fock(self, operation: str) -> None:
        if self.is_grid:
            raise DimensionMismatchError(f"{operation} requires a Fock truncation slice space")

    def grid_points(self) -> np.ndarray:
        self.require_grid("grid_points")
        return self.q_min + self.spacing * np.arange(self.dim, dtype=float)

    def grid_momenta(self) -> np.ndarray:
        self.require_grid("grid_momenta")
        return grid_momenta(self.dim, self.spacing)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "spacing": self.spacing,
            "q_min": self.q_min,
            "mass": self.mass,
            "omega": self.omega,
        }


def momentum_labels(dim: int) -> np.ndarray:
    """Integer labels k in {-floor(M/2), ..., ceil(M/2) - 1}."""
    return np.arange(-(dim // 2), (dim + 1) // 2)


def grid_momenta(dim: int, spacing: float) -> np.ndarray:
    return 2.0 * np.pi * momentum_labels(dim) / (dim * spacing)


@dataclass(frozen=True, eq=False)
class SliceOperator:
    """Dense M x M operator on one slice.

    ``kind`` is one of ``"unitary"``, ``"hermitian"`` or ``"general"``;
    labelled kinds are checked on construction.
    """

    space: SliceSpace
    matrix: np.ndarray
    label: str = ""
    kind: str = "general"

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatchError(
                f"operator {self.label or '?'} has shape {matrix.shape}, "
                f"expected ({self.space.dim}, {self.space.dim})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.kind == "unitary":
            residual = unitarity_residual(matrix)
            if residual >= UNITARY_TOL:
                raise DimensionMismatchError(
                    f"operator {self.label or '?'} labelled unitary has "
                    f"|U^dag U - 1| = {residual:.3e}"
                )
        elif self.kind == "hermitian":
            residual = float(np.max(np.abs(matrix - matrix.conj().T)))
            if residual >= HERMITIAN_TOL * max(1.0, float(np.max(np.abs(matrix)))):
                raise DimensionMismatchError(
                    f"operator {self.label or '?'} labelled hermitian has "
                    f"|A - A^dag| = {residual:.3e}"
                )
        elif self.kind != "general":
            raise DimensionMismatchError(f"unknown operator kind: {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def is_unitary(self) -> bool:
        return self.kind == "unitary"

    def dagger(self, label: str | None = None) -> SliceOperator:
        name = label or f"{self.label}^dag"
        return SliceOperator(self.space, self.matrix.conj().T, name, self.kind)

    def compose(self, other: SliceOperator, label: str | None = None) -> SliceOperator:
        """Return ``self @ other`` (other acts first)."""
        if other.space != self.space:
            raise DimensionMismatchError("cannot compose operators on different slice spaces")
        kind = "unitary" if self.is_unitary and other.is_unitary else "general"
        return SliceOperator(
            self.space, self.matrix @ other.matrix, label or f"{self.label}*{other.label}", kind
        )


def unitarity_residual(matrix: np.ndarray) -> float:
    eye = np.eye(matrix.shape[0])
    return float(np.max(np.abs(matrix.conj().T @ matrix - eye)))
