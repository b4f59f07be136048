"""Canonical quantum mechanics on a single slice space.

Everything here goes through ``scipy.linalg.expm`` and ordinary matrix
products. Nothing imports the extended space, so these values can serve as
the reference side of every trace identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from qaction.errors import DimensionMismatchError
from qaction.slices.space import SliceOperator, SliceSpace

TIME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EvolutionSchedule:
    """Piecewise-constant Hamiltonian: segment k runs ``hamiltonian`` for ``duration``."""

    segments: tuple[tuple[SliceOperator, float], ...]

    def __post_init__(self) -> None:
        segments = tuple((ham, float(duration)) for ham, duration in self.segments)
        if not segments:
            raise DimensionMismatchError("schedule needs at least one segment")
        space = segments[0][0].space
        for k, (ham, duration) in enumerate(segments):
            if not math.isfinite(duration) or duration <= 0:
                raise DimensionMismatchError(f"segments[{k}].duration must be > 0")
            if ham.space.dim != space.dim:
                raise DimensionMismatchError(f"segments[{k}] acts on a different slice dim")
        object.__setattr__(self, "segments", segments)

    @classmethod
    def constant(cls, hamiltonian: SliceOperator, total_time: float) -> EvolutionSchedule:
        return cls(((hamiltonian, total_time),))

    @classmethod
    def sliced(cls, hamiltonians: Sequence[SliceOperator], step: float) -> EvolutionSchedule:
        return cls(tuple((ham, step) for ham in hamiltonians))

    @property
    def space(self) -> SliceSpace:
        return self.segments[0][0].space

    @property
    def total_time(self) -> float:
        return math.fsum(duration for _, duration in self.segments)


def _segment_exponential(hamiltonian: SliceOperator, duration: complex) -> np.ndarray:
    return scipy.linalg.expm(-1j * duration * hamiltonian.matrix)


def evolve_between(schedule: EvolutionSchedule, t1: float, t2: float) -> SliceOperator:
    """U(t2, t1) for 0 <= t1 <= t2 <= T."""
    total = schedule.total_time
    tol = TIME_TOL * max(1.0, total)
    if t1 < -tol or t2 > total + tol or t2 < t1 - tol:
        raise DimensionMismatchError(f"evolution interval [{t1}, {t2}] outside [0, {total}]")
    result = np.eye(schedule.space.dim, dtype=complex)
    start = 0.0
    for ham, duration in schedule.segments:
        stop = start + duration
        lo, hi = max(start, t1), min(stop, t2)
        if hi - lo > tol:
            result = _segment_exponential(ham, hi - lo) @ result
        start = stop
    return SliceOperator(schedule.space, result, f"U({t2},{t1})")


def evolve(schedule: EvolutionSchedule, t: float | None = None) -> SliceOperator:
    """U(t), defaulting to the full schedule U(T)."""
    return evolve_between(schedule, 0.0, schedule.total_time if t is None else t)


def time_ordered_correlator(
    schedule: EvolutionSchedule,
    insertions: Sequence[tuple[float, SliceOperator]],
    q_in: int,
    q_out: int,
) -> complex:
    """<q_out| U(T, t_n) O_n ... U(t_2, t_1) O_1 U(t_1, 0) |q_in> with times sorted."""
    ordered = sorted(((float(t), op) for t, op in insertions), key=lambda item: item[0])
    for (a, _), (b, _) in zip(ordered, ordered[1:]):
        if abs(b - a) <= TIME_TOL * max(1.0, schedule.total_time):
            raise DimensionMismatchError(f"time ordering undefined for coincident times {a}")
    vector = np.zeros(schedule.space.dim, dtype=complex)
    vector[q_in] = 1.0
    previous = 0.0
    for t, op in ordered:
        vector = op.matrix @ (evolve_between(schedule, previous, t).matrix @ vector)
        previous = t
    vector = evolve_between(schedule, previous, schedule.total_time).matrix @ vector
    return complex(vector[q_out])


def vacuum_amplitude(hamiltonian: SliceOperator, total_time: float) -> complex:
    """<0|U(T)|0> in the basis of ``hamiltonian``'s slice space."""
    if total_time == 0:
        return 1.0 + 0.0j
    return complex(_segment_exponential(hamiltonian, total_time)[0, 0])


def thermal_correlator(
    hamiltonian: SliceOperator, beta: float, insertions: Sequence[tuple[float, SliceOperator]]
) -> complex:
    """Tr[e^{-(beta - th_n) H} O_n ... e^{-th_1 H} O_1] / Tr[e^{-beta H}], theta-ordered."""
    ordered = sorted(((float(theta), op) for theta, op in insertions), key=lambda item: item[0])
    for theta, _ in ordered:
        if theta < -TIME_TOL or theta > beta + TIME_TOL:
            raise DimensionMismatchError(f"imaginary time {theta} outside [0, {beta}]")
    product = np.eye(hamiltonian.dim, dtype=complex)
    previous = 0.0
    for theta, op in ordered:
        product = op.matrix @ _segment_exponential(hamiltonian, -1j * (theta - previous)) @ product
        previous = theta
    product = _segment_exponential(hamiltonian, -1j * (beta - previous)) @ product
    partition = np.trace(_segment_exponential(hamiltonian, -1j * beta))
    return complex(np.trace(product) / partition)


def vacuum_two_point(hamiltonian: SliceOperator, coordinate: SliceOperator, dt: float) -> complex:
    """<0| T[x_H(dt) x_H(0)] |0> for the ground state of ``hamiltonian``."""
    energies, vectors = scipy.linalg.eigh(hamiltonian.matrix)
    ground, e0 = vectors[:, 0], energies[0]
    x = coordinate.matrix
    if dt == 0:
        return complex(np.vdot(ground, x @ (x @ ground)))
    delay = abs(dt)
    # e^{i E0 |dt|} <0| x e^{-iH|dt|} x |0>
    propagated = _segment_exponential(hamiltonian, delay) @ (x @ ground)
    return complex(np.exp(1j * e0 * delay) * np.vdot(ground, x @ propagated))
