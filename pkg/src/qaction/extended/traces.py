"""Traces of e^{iS} with operator insertions.

With W_t = U_t O_t the trace Tr[e^{iS} (x)'_t O_t] is the cyclic sum
sum_i prod_t W_t[i_{t+1}, i_t]. ``enumerate`` walks the basis of the free
slices in fixed-size chunks (optionally on a thread pool, reduced in chunk
order so the result does not depend on the worker count). ``ring``
contracts the same cycle as a product of M x M matrices, which is the only
practical route once M^N is beyond the basis budget.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Sequence

import numpy as np

from qaction.errors import DimensionMismatchError
from qaction.extended.action import ActionSpec, InsertionList
from qaction.extended.state import check_basis_budget
from qaction.slices.space import SliceOperator

TraceMethod = Literal["auto", "enumerate", "ring"]

DEFAULT_MAX_BASIS_STATES = 2**20
CHUNK = 1 << 14


def _weights(spec: ActionSpec, insertions: InsertionList | None) -> list[np.ndarray]:
    steps = spec.step_matrices()
    if insertions is None:
        return list(steps)
    per_slice = insertions.per_slice(spec.space, spec.n_slices)
    return [u if o is None else u @ o for u, o in zip(steps, per_slice)]


def resolve_method(method: str, dim: int, free_slices: int, max_basis_states: int) -> str:
    if method == "auto":
        return "enumerate" if dim**free_slices <= max_basis_states else "ring"
    if method == "enumerate":
        check_basis_budget(dim, free_slices, max_basis_states, "trace enumeration")
        return method
    if method == "ring":
        return method
    raise DimensionMismatchError(f"unknown trace method: {method!r}")


def _cycle_chunk(
    weights: Sequence[np.ndarray],
    dim: int,
    free: Sequence[int],
    pinned: dict[int, int],
    start: int,
    stop: int,
) -> complex:
    n = len(weights)
    count = stop - start
    free_idx = np.unravel_index(np.arange(start, stop), (dim,) * len(free)) if free else ()
    idx: list[np.ndarray] = [None] * n  # type: ignore[list-item]
    for slot, t in enumerate(free):
        idx[t] = free_idx[slot]
    for t, value in pinned.items():
        idx[t] = np.full(count, value)
    values = np.ones(count, dtype=complex)
    for t, w in enumerate(weights):
        values *= w[idx[(t + 1) % n], idx[t]]
    return complex(values.sum())


def _enumerate_cycle(
    weights: Sequence[np.ndarray], dim: int, pinned: dict[int, int], threads: int
) -> complex:
    free = [t for t in range(len(weights)) if t not in pinned]
    total = dim ** len(free)
    bounds = [(start, min(total, start + CHUNK)) for start in range(0, total, CHUNK)]

    def run(bound: tuple[int, int]) -> complex:
        return _cycle_chunk(weights, dim, free, pinned, *bound)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run, bounds))
    else:
        partials = [run(bound) for bound in bounds]
    return complex(np.sum(np.asarray(partials, dtype=complex)))


def _ring_product(weights: Sequence[np.ndarray]) -> np.ndarray:
    """W_{N-1} ... W_1 W_0."""
    product = np.asarray(weights[0], dtype=complex)
    for w in weights[1:]:
        product = w @ product
    return product


def full_trace(
    spec: ActionSpec,
    insertions: InsertionList | None = None,
    *,
    method: TraceMethod = "auto",
    threads: int = 1,
    max_basis_states: int = DEFAULT_MAX_BASIS_STATES,
) -> complex:
    """Tr over the extended space of e^{iS} (x)'_t O^(t)."""
    weights = _weights(spec, insertions)
    route = resolve_method(method, spec.space.dim, spec.n_slices, max_basis_states)
    if route == "ring":
        return complex(np.trace(_ring_product(weights)))
    return _enumerate_cycle(weights, spec.space.dim, {}, threads)


def correlator_via_trace(
    spec: ActionSpec,
    insertions: InsertionList | None,
    q_in: int,
    q_out: int,
    *,
    method: TraceMethod = "auto",
    threads: int = 1,
    max_basis_states: int = DEFAULT_MAX_BASIS_STATES,
) -> complex:
    """Tr[e^{iS} (x)'_t O_t |q_in>_0<q_out|].

    Only kets with slice 0 equal to ``q_out`` survive the projector, so the
    enumeration runs over the M^(N-1) states of slices 1..N-1.
    """
    dim = spec.space.dim
    for name, q in (("q_in", q_in), ("q_out", q_out)):
        if not 0 <= q < dim:
            raise DimensionMismatchError(f"{name}={q} outside [0, {dim})")
    projector = np.zeros((dim, dim), dtype=complex)
    projector[q_in, q_out] = 1.0
    weights = _weights(spec, insertions)
    weights[0] = weights[0] @ projector
    route = resolve_method(method, dim, spec.n_slices - 1, max_basis_states)
    if route == "ring":
        return complex(np.trace(_ring_product(weights)))
    return _enumerate_cycle(weights, dim, {0: q_out}, threads)


def propagator_via_trace(
    spec: ActionSpec,
    q_in: int,
    q_out: int,
    *,
    method: TraceMethod = "auto",
    threads: int = 1,
    max_basis_states: int = DEFAULT_MAX_BASIS_STATES,
) -> complex:
    """<q_out| U_{N-1} ... U_0 |q_in> read off as a trace over the extended space."""
    return correlator_via_trace(
        spec, None, q_in, q_out, method=method, threads=threads, max_basis_states=max_basis_states
    )


def thermal_correlator_via_trace(
    spec: ActionSpec,
    insertions: InsertionList,
    *,
    method: TraceMethod = "auto",
    threads: int = 1,
    max_basis_states: int = DEFAULT_MAX_BASIS_STATES,
) -> complex:
    """Ratio of Wick-rotated traces; slice t sits at imaginary time t * beta / N."""
    if not spec.wick:
        raise DimensionMismatchError("thermal correlators need a Wick-rotated action spec")
    kwargs = {"method": method, "threads": threads, "max_basis_states": max_basis_states}
    return full_trace(spec, insertions, **kwargs) / full_trace(spec, None, **kwargs)


def partial_trace_action(
    spec: ActionSpec,
    *,
    method: TraceMethod = "auto",
    max_basis_states: int = DEFAULT_MAX_BASIS_STATES,
) -> SliceOperator:
    """Tr over slices 1..N-1 of e^{iS}, an operator on slice 0."""
    steps = spec.step_matrices()
    n, dim = spec.n_slices, spec.space.dim
    if n == 1:
        return SliceOperator(spec.space, steps[0], "Tr'[e^iS]")
    route = resolve_method(method, dim, n - 1, max_basis_states)
    if route == "ring":
        return SliceOperator(spec.space, _ring_product(steps), "Tr'[e^iS]")
    # <j|R|i> = sum_b U_{N-1}[j, b_{N-1}] (prod_{t=1}^{N-2} U_t[b_{t+1}, b_t]) U_0[b_1, i]
    total = dim ** (n - 1)
    result = np.zeros((dim, dim), dtype=complex)
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        b = np.unravel_index(np.arange(start, stop), (dim,) * (n - 1))
        inner = np.ones(stop - start, dtype=complex)
        for t in range(1, n - 1):
            inner *= steps[t][b[t], b[t - 1]]
        result += np.einsum("jb,b,bi->ji", steps[n - 1][:, b[-1]], inner, steps[0][b[0], :])
    return SliceOperator(spec.space, result, "Tr'[e^iS]")
