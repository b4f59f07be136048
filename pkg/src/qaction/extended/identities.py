"""Exact identities of e^{iS} checked against dense and canonical evaluations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qaction.errors import DimensionMismatchError
from qaction.extended.action import (
    DENSE_LIMIT,
    ActionSpec,
    apply_action,
    dense_action_matrix,
    dense_shift_matrix,
    dense_slicewise_matrix,
)
from qaction.extended.state import ExtendedState, apply_time_shift, check_basis_budget
from qaction.extended.traces import TraceMethod, partial_trace_action, propagator_via_trace
from qaction.oracle.canonical import EvolutionSchedule, evolve
from qaction.slices.operators import (
    Potential,
    build_hamiltonian,
    dft_momentum_basis,
    kinetic_operator,
    potential_operator,
    propagator_step,
)
from qaction.slices.space import SliceOperator, SliceSpace


@dataclass(frozen=True)
class ConvergenceTable:
    """Errors against a step parameter, with the fitted log-log order."""

    steps: tuple[float, ...]
    errors: tuple[float, ...]
    values: tuple[complex, ...] = ()
    reference: complex | None = None

    def order(self) -> float:
        mask = np.asarray(self.errors) > 0
        if mask.sum() < 2:
            return float("nan")
        x = np.log(np.asarray(self.steps)[mask])
        y = np.log(np.asarray(self.errors)[mask])
        return float(np.polyfit(x, y, 1)[0])

    def rows(self) -> list[dict]:
        out = []
        for k, (step, error) in enumerate(zip(self.steps, self.errors)):
            row: dict = {"step": step, "error": error}
            if self.values:
                row["value"] = self.values[k]
            out.append(row)
        return out


def _plane_wave_state(space: SliceSpace, p_indices: Sequence[int]) -> ExtendedState:
    space.require_grid("plane wave states")
    check_basis_budget(space.dim, len(p_indices), DENSE_LIMIT * 64, "plane wave state")
    fourier = dft_momentum_basis(space).matrix
    return ExtendedState.product([fourier[:, k] for k in p_indices], space)


def _trajectory(space: SliceSpace, q_indices: Sequence[int], p_indices: Sequence[int]):
    if len(q_indices) != len(p_indices):
        raise DimensionMismatchError("q and p multi-indices must have the same slice count")
    q = space.grid_points()[list(q_indices)]
    p = space.grid_momenta()[list(p_indices)]
    fourier = dft_momentum_basis(space).matrix
    overlap = complex(np.prod(fourier[list(q_indices), list(p_indices)]))
    return q, p, overlap


def verify_legendre_phase(
    space: SliceSpace, n_slices: int, q_indices: Sequence[int], p_indices: Sequence[int]
) -> tuple[complex, complex]:
    """(<q|e^{iP eps}|p>, e^{i sum_t p_t (q_{t+1} - q_t)} <q|p>) with q_N = q_0."""
    if len(q_indices) != n_slices:
        raise DimensionMismatchError(f"expected {n_slices} slice indices")
    shifted = apply_time_shift(_plane_wave_state(space, p_indices), 1)
    lhs = shifted.amplitude(q_indices)
    q, p, overlap = _trajectory(space, q_indices, p_indices)
    rhs = np.exp(1j * np.sum(p * (np.roll(q, -1) - q))) * overlap
    return lhs, complex(rhs)


def free_particle_action_phase(
    space: SliceSpace,
    n_slices: int,
    epsilon: float,
    mass: float,
    q_indices: Sequence[int],
    p_indices: Sequence[int],
) -> tuple[complex, complex]:
    """<q|e^{iS}|p> for H = p^2/2m against exp{i sum_t [p_t dq_t - eps p_t^2 / 2m]} <q|p>."""
    if len(q_indices) != n_slices:
        raise DimensionMismatchError(f"expected {n_slices} slice indices")
    spec = ActionSpec.from_hamiltonian(kinetic_operator(space, mass), n_slices, epsilon)
    lhs = apply_action(spec, _plane_wave_state(space, p_indices)).amplitude(q_indices)
    q, p, overlap = _trajectory(space, q_indices, p_indices)
    phase = np.sum(p * (np.roll(q, -1) - q) - epsilon * p**2 / (2.0 * mass))
    return lhs, complex(np.exp(1j * phase) * overlap)


def verify_interleaving_identity(spec: ActionSpec, max_states: int = DENSE_LIMIT) -> float:
    """Relative Frobenius residual of e^{iS} - U_0(T) V^dag e^{iP eps} V.

    V = (x)_t U(t eps)^dag with U(t eps) = U_{t-1} ... U_0.
    """
    dense = dense_action_matrix(spec, max_states)
    steps = spec.step_matrices()
    eye = np.eye(spec.space.dim, dtype=complex)
    cumulative = [eye]
    for t in range(1, spec.n_slices):
        cumulative.append(steps[t - 1] @ cumulative[-1])
    u_total = steps[-1] @ cumulative[-1]
    interleave = dense_slicewise_matrix([u.conj().T for u in cumulative])
    head = dense_slicewise_matrix([u_total] + [eye] * (spec.n_slices - 1))
    shift = dense_shift_matrix(spec.space, spec.n_slices, max_states)
    rebuilt = head @ interleave.conj().T @ shift @ interleave
    scale = float(np.linalg.norm(dense))
    return float(np.linalg.norm(dense - rebuilt) / scale)


def _static_hamiltonian(spec: ActionSpec) -> SliceOperator:
    if spec.wick or spec.hamiltonians is None:
        raise DimensionMismatchError("need a real-time action spec built from a Hamiltonian")
    first = spec.hamiltonians[0]
    if any(not np.array_equal(h.matrix, first.matrix) for h in spec.hamiltonians[1:]):
        raise DimensionMismatchError("discrete Schrodinger check needs a time-independent H")
    return first


def _one_extra_slice(
    spec: ActionSpec, step: SliceOperator, q_in: int, q_out: int, **kwargs
) -> complex:
    # H' = H (x) H_N: the extra slice either evolves once more or idles.
    moved = propagator_via_trace(spec.extended([step]), q_in, q_out, **kwargs)
    idle = propagator_via_trace(spec.with_identity_slices(1), q_in, q_out, **kwargs)
    return moved - idle


def verify_discrete_schrodinger(
    spec: ActionSpec, q_in: int, q_out: int, *, method: TraceMethod = "auto"
) -> tuple[complex, complex]:
    """(<q',T+eps|q> - <q',T|q> from traces, <q',T|(e^{-iH eps} - 1)|q> from the oracle)."""
    hamiltonian = _static_hamiltonian(spec)
    lhs = _one_extra_slice(spec, spec.step_ops[0], q_in, q_out, method=method)
    total = float(np.real(spec.total_time))
    u_total = evolve(EvolutionSchedule.constant(hamiltonian, total)).matrix
    step = float(np.real(spec.epsilon))
    u_step = evolve(EvolutionSchedule.constant(hamiltonian, step)).matrix
    rhs = (u_total @ (u_step - np.eye(spec.space.dim)))[q_out, q_in]
    return lhs, complex(rhs)


def schrodinger_quotient_sweep(
    spec: ActionSpec,
    q_in: int,
    q_out: int,
    deltas: Sequence[float],
    *,
    method: TraceMethod = "auto",
) -> ConvergenceTable:
    """Difference quotients (<q',T+delta|q> - <q',T|q>) / delta against -i<q',T|H|q>."""
    hamiltonian = _static_hamiltonian(spec)
    total = float(np.real(spec.total_time))
    u_total = evolve(EvolutionSchedule.constant(hamiltonian, total)).matrix
    target = complex(-1j * (u_total @ hamiltonian.matrix)[q_out, q_in])
    quotients, errors = [], []
    for delta in deltas:
        if not math.isfinite(delta) or delta <= 0:
            raise DimensionMismatchError(f"delta must be > 0, got {delta!r}")
        step = propagator_step(hamiltonian, delta)
        quotient = _one_extra_slice(spec, step, q_in, q_out, method=method) / delta
        quotients.append(quotient)
        errors.append(abs(quotient - target))
    return ConvergenceTable(tuple(deltas), tuple(errors), tuple(quotients), target)


def trotter_order_experiment(
    space: SliceSpace,
    potential: Potential,
    mass: float,
    total_time: float,
    epsilons: Sequence[float],
    pairs: Sequence[tuple[int, int]] | None = None,
) -> ConvergenceTable:
    """Max propagator error of the split step e^{-iV eps} e^{-iK eps} after T / eps steps."""
    kinetic = kinetic_operator(space, mass)
    pot = potential_operator(space, potential)
    hamiltonian = build_hamiltonian(space, potential, mass)
    exact = evolve(EvolutionSchedule.constant(hamiltonian, total_time))
    errors = []
    for eps in epsilons:
        n_steps = int(round(total_time / eps))
        if n_steps < 1 or abs(n_steps * eps - total_time) > 1e-9 * total_time:
            raise DimensionMismatchError(f"eps={eps} does not divide T={total_time}")
        split = propagator_step(pot, eps).compose(propagator_step(kinetic, eps), "U_split")
        spec = ActionSpec.from_steps(space, [split] * n_steps, eps)
        diff = partial_trace_action(spec, method="ring").matrix - exact.matrix
        if pairs is not None:
            rows, cols = zip(*[(q_out, q_in) for q_in, q_out in pairs])
            diff = diff[list(rows), list(cols)]
        errors.append(float(np.max(np.abs(diff))))
    return ConvergenceTable(tuple(float(e) for e in epsilons), tuple(errors))
