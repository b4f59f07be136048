"""The quantum action exponential e^{iS} = e^{iP_t eps} (x)_t U_t and its dense forms."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from qaction.errors import DimensionMismatchError
from qaction.extended.state import (
    ExtendedState,
    basis_batch,
    check_basis_budget,
    shift_tensor,
    slice_matrices,
    slicewise_tensor,
)
from qaction.slices.operators import identity, propagator_step
from qaction.slices.space import SliceOperator, SliceSpace

DENSE_LIMIT = 4096
_DENSE_CHUNK = 256


@dataclass(frozen=True, eq=False)
class ActionSpec:
    """Step operators U_t[(t+1)eps, t eps] for t = 0..N-1.

    ``hamiltonians`` is kept when the spec was built from Hamiltonians so
    that identity checks can rebuild neighbouring specs and oracle values.
    """

    space: SliceSpace
    n_slices: int
    epsilon: complex
    step_ops: tuple[SliceOperator, ...]
    wick: bool = False
    hamiltonians: tuple[SliceOperator, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        steps = tuple(self.step_ops)
        if self.n_slices < 1 or len(steps) != self.n_slices:
            raise DimensionMismatchError(
                f"action spec needs n_slices >= 1 step operators, got {len(steps)} "
                f"for n_slices={self.n_slices}"
            )
        slice_matrices(steps, self.space, self.n_slices)
        object.__setattr__(self, "step_ops", steps)
        if self.hamiltonians is not None:
            hams = tuple(self.hamiltonians)
            slice_matrices(hams, self.space, self.n_slices)
            object.__setattr__(self, "hamiltonians", hams)

    @classmethod
    def from_hamiltonian(
        cls, hamiltonian: SliceOperator, n_slices: int, epsilon: float
    ) -> ActionSpec:
        return cls.from_hamiltonians([hamiltonian] * n_slices, epsilon)

    @classmethod
    def from_hamiltonians(
        cls, hamiltonians: Sequence[SliceOperator], epsilon: float
    ) -> ActionSpec:
        """Piecewise-constant H(t): slice t evolves with hamiltonians[t] for one step."""
        if not hamiltonians:
            raise DimensionMismatchError("need at least one Hamiltonian")
        cache: dict[int, SliceOperator] = {}
        steps = []
        for ham in hamiltonians:
            if id(ham) not in cache:
                cache[id(ham)] = propagator_step(ham, epsilon)
            steps.append(cache[id(ham)])
        space = hamiltonians[0].space
        return cls(space, len(steps), epsilon, tuple(steps), False, tuple(hamiltonians))

    @classmethod
    def from_steps(
        cls, space: SliceSpace, steps: Sequence[SliceOperator], epsilon: complex = 1.0
    ) -> ActionSpec:
        return cls(space, len(steps), epsilon, tuple(steps))

    @classmethod
    def wick_rotated(cls, hamiltonian: SliceOperator, n_slices: int, beta: float) -> ActionSpec:
        """eps -> -i beta / N, so every step is e^{-beta H / N}."""
        epsilon = -1j * beta / n_slices
        steps = (propagator_step(hamiltonian, epsilon),) * n_slices
        hams = (hamiltonian,) * n_slices
        return cls(hamiltonian.space, n_slices, epsilon, steps, True, hams)

    @property
    def total_time(self) -> complex:
        return self.epsilon * self.n_slices

    @property
    def is_unitary(self) -> bool:
        return all(op.is_unitary for op in self.step_ops)

    @property
    def is_time_independent(self) -> bool:
        first = self.step_ops[0].matrix
        return all(np.array_equal(op.matrix, first) for op in self.step_ops[1:])

    @property
    def basis_size(self) -> int:
        return self.space.dim**self.n_slices

    def step_matrices(self) -> list[np.ndarray]:
        return [op.matrix for op in self.step_ops]

    def in_basis(self, change: SliceOperator) -> ActionSpec:
        """Rewrite every slice in the basis given by the columns of ``change``."""
        if not change.is_unitary:
            raise DimensionMismatchError("basis change must be a unitary slice operator")
        c, c_dag = change.matrix, change.matrix.conj().T

        def conj(op: SliceOperator) -> SliceOperator:
            return SliceOperator(op.space, c_dag @ op.matrix @ c, op.label, op.kind)

        hams = None if self.hamiltonians is None else tuple(conj(h) for h in self.hamiltonians)
        steps = tuple(conj(op) for op in self.step_ops)
        return ActionSpec(self.space, self.n_slices, self.epsilon, steps, self.wick, hams)

    def extended(self, extra_steps: Iterable[SliceOperator]) -> ActionSpec:
        """Append slices carrying ``extra_steps``; the new last slice closes the cycle."""
        extra = tuple(extra_steps)
        steps = self.step_ops + extra
        return ActionSpec(self.space, len(steps), self.epsilon, steps, self.wick)

    def with_identity_slices(self, count: int) -> ActionSpec:
        return self.extended([identity(self.space)] * count)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "n_slices": self.n_slices,
            "epsilon": {"re": complex(self.epsilon).real, "im": complex(self.epsilon).imag},
            "wick": self.wick,
        }


@dataclass(frozen=True, eq=False)
class InsertionList:
    """Operators inserted on distinct slices, (t, O^(t)) pairs."""

    items: tuple[tuple[int, SliceOperator], ...] = ()

    def __post_init__(self) -> None:
        items = tuple((int(t), op) for t, op in self.items)
        seen: set[int] = set()
        for t, _ in items:
            if t in seen:
                raise DimensionMismatchError(f"duplicate insertion on slice {t}")
            seen.add(t)
        object.__setattr__(self, "items", tuple(sorted(items, key=lambda item: item[0])))

    @classmethod
    def of(cls, *pairs: tuple[int, SliceOperator]) -> InsertionList:
        return cls(tuple(pairs))

    def __len__(self) -> int:
        return len(self.items)

    def slices(self) -> list[int]:
        return [t for t, _ in self.items]

    def validate(self, space: SliceSpace, n_slices: int) -> None:
        for t, op in self.items:
            if not 0 <= t < n_slices:
                raise DimensionMismatchError(f"insertion slice {t} outside [0, {n_slices})")
            if op.space.dim != space.dim:
                raise DimensionMismatchError(
                    f"insertion on slice {t} has dim {op.space.dim}, expected {space.dim}"
                )

    def per_slice(self, space: SliceSpace, n_slices: int) -> list[np.ndarray | None]:
        """One matrix per slice, ``None`` where nothing is inserted."""
        self.validate(space, n_slices)
        out: list[np.ndarray | None] = [None] * n_slices
        for t, op in self.items:
            out[t] = op.matrix
        return out


def apply_action(spec: ActionSpec, state: ExtendedState) -> ExtendedState:
    """Slicewise U_t, then the cyclic shift."""
    if state.space.dim != spec.space.dim or state.n_slices != spec.n_slices:
        raise DimensionMismatchError("state and action spec disagree on slice dim or count")
    tensor = slicewise_tensor(state.tensor(), spec.step_matrices())
    shifted = shift_tensor(tensor, 1, spec.n_slices)
    return state.with_amplitudes(np.ascontiguousarray(shifted).reshape(-1))


def action_matrix_element(
    spec: ActionSpec, out_indices: Sequence[int], in_indices: Sequence[int]
) -> complex:
    """<k|e^{iS}|i> = prod_t U_t[k_{t+1 mod N}, i_t]."""
    n = spec.n_slices
    if len(out_indices) != n or len(in_indices) != n:
        raise DimensionMismatchError(f"multi-indices must have {n} entries")
    value = 1.0 + 0.0j
    for t, step in enumerate(spec.step_ops):
        value *= step.matrix[out_indices[(t + 1) % n], in_indices[t]]
    return complex(value)


def dense_columns(
    spec: ActionSpec,
    insertions: Sequence[np.ndarray | None] | None = None,
    max_states: int = DENSE_LIMIT,
) -> np.ndarray:
    """Dense e^{iS} (x)' O assembled column by column from the matrix-free path."""
    total = check_basis_budget(spec.space.dim, spec.n_slices, max_states, "dense assembly")
    dense = np.empty((total, total), dtype=complex)
    steps = spec.step_matrices()
    for start in range(0, total, _DENSE_CHUNK):
        stop = min(total, start + _DENSE_CHUNK)
        batch = basis_batch(spec.space.dim, spec.n_slices, start, stop)
        if insertions is not None:
            batch = slicewise_tensor(batch, insertions)
        batch = shift_tensor(slicewise_tensor(batch, steps), 1, spec.n_slices)
        dense[:, start:stop] = batch.reshape(stop - start, total).T
    return dense


def dense_action_matrix(spec: ActionSpec, max_states: int = DENSE_LIMIT) -> np.ndarray:
    return dense_columns(spec, None, max_states)


def dense_shift_matrix(
    space: SliceSpace, n_slices: int, max_states: int = DENSE_LIMIT
) -> np.ndarray:
    total = check_basis_budget(space.dim, n_slices, max_states, "dense shift")
    perm = shift_tensor(np.arange(total).reshape((space.dim,) * n_slices), 1, n_slices)
    dense = np.zeros((total, total), dtype=complex)
    # new[x] = old[perm[x]]
    dense[np.arange(total), np.ascontiguousarray(perm).reshape(-1)] = 1.0
    return dense


def dense_slicewise_matrix(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product with slice 0 as the most significant factor."""
    return functools.reduce(np.kron, [np.asarray(m, dtype=complex) for m in matrices])
