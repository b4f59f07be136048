"""Tensor-product-in-time states and their matrix-free primitives.

Amplitudes are stored flat with slice t = 0 as the most significant digit,
so ``amplitudes.reshape((M,) * N)`` indexes ``[i_0, ..., i_{N-1}]``. Every
primitive here also accepts a leading batch axis, which is how the trace and
dense-assembly code push many kets through at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qaction.errors import DimensionMismatchError, SizeGuardError
from qaction.slices.space import SliceOperator, SliceSpace


def linear_index(indices: Sequence[int], dim: int) -> int:
    """sum_t i_t * M^(N-1-t)."""
    value = 0
    for i in indices:
        if not 0 <= int(i) < dim:
            raise DimensionMismatchError(f"slice index {i} outside [0, {dim})")
        value = value * dim + int(i)
    return value


def multi_index(index: int, dim: int, n_slices: int) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(int(index), (dim,) * n_slices))


def check_basis_budget(dim: int, n_slices: int, max_states: int, operation: str) -> int:
    total = dim**n_slices
    if total > max_states:
        raise SizeGuardError(
            f"{operation}: M^N = {dim}^{n_slices} = {total} exceeds the budget of {max_states}"
        )
    return total


@dataclass(frozen=True, eq=False)
class ExtendedState:
    """A vector in the N-fold tensor product of one slice space."""

    space: SliceSpace
    n_slices: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_slices, int) or self.n_slices < 1:
            raise DimensionMismatchError(f"n_slices must be an int >= 1, got {self.n_slices!r}")
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        expected = self.space.dim**self.n_slices
        if amplitudes.size != expected:
            raise DimensionMismatchError(
                f"state has {amplitudes.size} amplitudes, expected M^N = {expected}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis(cls, space: SliceSpace, indices: Sequence[int]) -> ExtendedState:
        amplitudes = np.zeros(space.dim ** len(indices), dtype=complex)
        amplitudes[linear_index(indices, space.dim)] = 1.0
        return cls(space, len(indices), amplitudes)

    @classmethod
    def product(cls, vectors: Sequence[np.ndarray], space: SliceSpace) -> ExtendedState:
        """Tensor product of one single-slice vector per slice."""
        if not vectors:
            raise DimensionMismatchError("product state needs at least one slice vector")
        amplitudes = np.ones(1, dtype=complex)
        for v in vectors:
            v = np.asarray(v, dtype=complex)
            if v.shape != (space.dim,):
                raise DimensionMismatchError(f"slice vector has shape {v.shape}")
            amplitudes = np.kron(amplitudes, v)
        return cls(space, len(vectors), amplitudes)

    @classmethod
    def random(cls, space: SliceSpace, n_slices: int, rng: np.random.Generator) -> ExtendedState:
        size = space.dim**n_slices
        amplitudes = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return cls(space, n_slices, amplitudes / np.linalg.norm(amplitudes))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.space.dim,) * self.n_slices

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, indices: Sequence[int]) -> complex:
        return complex(self.amplitudes[linear_index(indices, self.space.dim)])

    def inner(self, other: ExtendedState) -> complex:
        """<self|other>."""
        _require_same(self, other.space, other.n_slices)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def with_amplitudes(self, amplitudes: np.ndarray) -> ExtendedState:
        return ExtendedState(self.space, self.n_slices, amplitudes)


def shift_tensor(tensor: np.ndarray, direction: int, n_slices: int) -> np.ndarray:
    """Cyclic time shift on the last ``n_slices`` axes of ``tensor``.

    +1 sends |q_1 q_2 ... q_N> to |q_N q_1 ... q_{N-1}>.
    """
    if direction not in (1, -1):
        raise DimensionMismatchError(f"shift direction must be +1 or -1, got {direction!r}")
    first = tensor.ndim - n_slices
    if direction == 1:
        return np.moveaxis(tensor, -1, first)
    return np.moveaxis(tensor, first, -1)


def slicewise_tensor(tensor: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Apply op_t to slice axis t of the trailing len(matrices) axes."""
    n_slices = len(matrices)
    first = tensor.ndim - n_slices
    for t, matrix in enumerate(matrices):
        if matrix is None:
            continue
        axis = first + t
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [axis])), 0, axis)
    return tensor


def apply_time_shift(state: ExtendedState, direction: int = 1) -> ExtendedState:
    shifted = shift_tensor(state.tensor(), direction, state.n_slices)
    return state.with_amplitudes(np.ascontiguousarray(shifted).reshape(-1))


def apply_slicewise(state: ExtendedState, ops: Sequence[SliceOperator]) -> ExtendedState:
    """Apply the tensor product of one operator per slice without forming it."""
    matrices = slice_matrices(ops, state.space, state.n_slices)
    tensor = slicewise_tensor(state.tensor(), matrices)
    return state.with_amplitudes(np.ascontiguousarray(tensor).reshape(-1))


def slice_matrices(
    ops: Sequence[SliceOperator], space: SliceSpace, n_slices: int
) -> list[np.ndarray]:
    if len(ops) != n_slices:
        raise DimensionMismatchError(f"expected {n_slices} slice operators, got {len(ops)}")
    matrices = []
    for t, op in enumerate(ops):
        if op.space.dim != space.dim:
            raise DimensionMismatchError(
                f"slice operator {t} has dim {op.space.dim}, state slices have dim {space.dim}"
            )
        matrices.append(op.matrix)
    return matrices


def _require_same(state: ExtendedState, space: SliceSpace, n_slices: int) -> None:
    if state.space.dim != space.dim or state.n_slices != n_slices:
        raise DimensionMismatchError(
            f"state is ({state.space.dim}^{state.n_slices}), expected ({space.dim}^{n_slices})"
        )


def basis_batch(dim: int, n_slices: int, start: int, stop: int) -> np.ndarray:
    """One-hot kets for linear indices [start, stop), shaped (B, M, ..., M)."""
    size = stop - start
    batch = np.zeros((size, dim**n_slices), dtype=complex)
    batch[np.arange(size), np.arange(start, stop)] = 1.0
    return batch.reshape((size,) + (dim,) * n_slices)
