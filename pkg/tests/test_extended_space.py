import math

import numpy as np
import pytest

from qaction.errors import DimensionMismatchError, SizeGuardError
from qaction.extended import (
    ActionSpec,
    ExtendedState,
    InsertionList,
    action_matrix_element,
    apply_action,
    apply_slicewise,
    apply_time_shift,
    correlator_via_trace,
    dense_action_matrix,
    dense_shift_matrix,
    dense_slicewise_matrix,
    free_particle_action_phase,
    full_trace,
    partial_trace_action,
    propagator_via_trace,
    schrodinger_quotient_sweep,
    thermal_correlator_via_trace,
    trotter_order_experiment,
    verify_discrete_schrodinger,
    verify_interleaving_identity,
    verify_legendre_phase,
)
from qaction.extended.state import linear_index, multi_index
from qaction.oracle import (
    EvolutionSchedule,
    evolve,
    thermal_correlator,
    time_ordered_correlator,
)
from qaction.slices import (
    SliceSpace,
    build_hamiltonian,
    dft_momentum_basis,
    eigenbasis,
    harmonic_hamiltonian,
    harmonic_potential,
    position_operator,
    random_hermitian,
)


def _harmonic_grid(dim: int = 6, spacing: float = 0.5, omega: float = 1.0):
    space = SliceSpace.position_grid(dim, spacing)
    return space, build_hamiltonian(space, harmonic_potential(1.0, omega))


def test_linear_and_multi_index_agree() -> None:
    assert linear_index([1, 0, 2], 3) == 1 * 9 + 0 * 3 + 2
    assert multi_index(11, 3, 3) == (1, 0, 2)
    with pytest.raises(DimensionMismatchError):
        linear_index([3], 3)


def test_time_shift_moves_last_slice_to_front() -> None:
    space = SliceSpace.position_grid(3)
    shifted = apply_time_shift(ExtendedState.basis(space, [0, 1, 2]), 1)
    assert shifted.amplitude([2, 0, 1]) == 1.0
    back = apply_time_shift(shifted, -1)
    assert back.amplitude([0, 1, 2]) == 1.0


def test_time_shift_has_period_n(rng: np.random.Generator) -> None:
    space = SliceSpace.position_grid(3)
    state = ExtendedState.random(space, 4, rng)
    shifted = state
    for _ in range(4):
        shifted = apply_time_shift(shifted, 1)
    np.testing.assert_allclose(shifted.amplitudes, state.amplitudes)
    assert shifted.norm() == pytest.approx(1.0)


def test_slicewise_matches_kronecker(rng: np.random.Generator) -> None:
    space = SliceSpace.position_grid(3)
    ops = [random_hermitian(space, rng) for _ in range(3)]
    state = ExtendedState.random(space, 3, rng)
    dense = dense_slicewise_matrix([op.matrix for op in ops])
    np.testing.assert_allclose(
        apply_slicewise(state, ops).amplitudes, dense @ state.amplitudes, atol=1e-12
    )


def test_action_matrix_elements_three_ways(rng: np.random.Generator) -> None:
    space = SliceSpace.position_grid(3)
    spec = ActionSpec.from_hamiltonian(random_hermitian(space, rng), 3, 0.3)
    dense = dense_action_matrix(spec)
    out_idx, in_idx = (2, 0, 1), (1, 1, 0)
    via_state = apply_action(spec, ExtendedState.basis(space, in_idx)).amplitude(out_idx)
    element = action_matrix_element(spec, out_idx, in_idx)
    dense_element = dense[linear_index(out_idx, 3), linear_index(in_idx, 3)]
    assert via_state == pytest.approx(element, abs=1e-14)
    assert dense_element == pytest.approx(element, abs=1e-14)


def test_dense_action_is_unitary_and_shift_is_permutation(rng: np.random.Generator) -> None:
    space = SliceSpace.position_grid(3)
    spec = ActionSpec.from_hamiltonian(random_hermitian(space, rng), 3, 0.3)
    dense = dense_action_matrix(spec)
    np.testing.assert_allclose(dense.conj().T @ dense, np.eye(27), atol=1e-12)
    shift = dense_shift_matrix(space, 3)
    assert np.all(shift.sum(axis=0) == 1)
    assert np.all(shift.sum(axis=1) == 1)


def test_dense_assembly_is_size_guarded() -> None:
    space = SliceSpace.position_grid(4)
    spec = ActionSpec.from_hamiltonian(harmonic_hamiltonian(SliceSpace.fock(4)), 7, 0.1)
    with pytest.raises(SizeGuardError):
        dense_action_matrix(spec, max_states=4**6)
    with pytest.raises(SizeGuardError):
        dense_shift_matrix(space, 7, max_states=100)


def test_propagator_identity_random_hamiltonian() -> None:
    rng = np.random.default_rng(7)
    space = SliceSpace.position_grid(8)
    ham = random_hermitian(space, rng)
    spec = ActionSpec.from_hamiltonian(ham, 4, 0.25)
    exact = evolve(EvolutionSchedule.constant(ham, 1.0)).matrix
    scale = np.max(np.abs(exact))
    for _ in range(5):
        q_in, q_out = (int(v) for v in rng.integers(0, 8, size=2))
        value = propagator_via_trace(spec, q_in, q_out)
        assert abs(value - exact[q_out, q_in]) / scale < 1e-10


def test_propagator_ring_and_enumerate_agree() -> None:
    space, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 4, 0.25)
    enumerated = propagator_via_trace(spec, 1, 4, method="enumerate")
    ring = propagator_via_trace(spec, 1, 4, method="ring")
    assert enumerated == pytest.approx(ring, abs=1e-13)


def test_correlator_identity_two_position_insertions() -> None:
    space, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 4, 0.25)
    x = position_operator(space)
    insertions = InsertionList.of((2, x), (1, x))
    schedule = EvolutionSchedule.constant(ham, 1.0)
    for q_in, q_out in [(0, 0), (2, 3), (5, 1)]:
        value = correlator_via_trace(spec, insertions, q_in, q_out)
        ref = time_ordered_correlator(schedule, [(0.25, x), (0.5, x)], q_in, q_out)
        assert abs(value - ref) < 1e-10 * max(1.0, abs(ref))


def test_duplicate_insertion_slices_are_rejected() -> None:
    x = position_operator(SliceSpace.position_grid(3))
    with pytest.raises(DimensionMismatchError):
        InsertionList.of((1, x), (1, x))


def test_insertion_outside_slices_is_rejected() -> None:
    space, ham = _harmonic_grid(dim=3)
    spec = ActionSpec.from_hamiltonian(ham, 2, 0.5)
    with pytest.raises(DimensionMismatchError):
        full_trace(spec, InsertionList.of((2, position_operator(space))))


def test_trace_identity_against_trace_of_u() -> None:
    _, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 4, 0.25)
    value = full_trace(spec, method="enumerate")
    ref = np.trace(evolve(EvolutionSchedule.constant(ham, 1.0)).matrix)
    assert abs(value - ref) / abs(ref) < 1e-12


def test_wick_rotated_trace_is_thermal_partition_function() -> None:
    beta, omega = 1.0, 1.0
    closed = 1.0 / (2.0 * math.sinh(beta * omega / 2.0))
    values = []
    for dim in (40, 80):
        ham = harmonic_hamiltonian(SliceSpace.fock(dim, omega=omega))
        values.append(full_trace(ActionSpec.wick_rotated(ham, 4, beta)))
    assert abs(values[0] - values[1]) < 1e-8
    assert values[0] == pytest.approx(closed, rel=1e-10)


def test_real_time_fock_trace_is_truncated_level_sum() -> None:
    dim, n_slices, total, omega = 40, 6, 1.3, 1.0
    ham = harmonic_hamiltonian(SliceSpace.fock(dim, omega=omega))
    spec = ActionSpec.from_hamiltonian(ham, n_slices, total / n_slices)
    # 40**6 basis states: only the ring contraction fits the default budget
    value = full_trace(spec)
    expected = np.sum(np.exp(-1j * omega * (np.arange(dim) + 0.5) * total))
    assert abs(value - expected) < 1e-11


def test_thermal_correlator_matches_oracle() -> None:
    space = SliceSpace.fock(10)
    ham = harmonic_hamiltonian(space)
    x = position_operator(space)
    spec = ActionSpec.wick_rotated(ham, 4, 2.0)
    value = thermal_correlator_via_trace(spec, InsertionList.of((0, x), (2, x)))
    ref = thermal_correlator(ham, 2.0, [(0.0, x), (1.0, x)])
    assert value == pytest.approx(ref, abs=1e-10)


def test_thermal_correlator_needs_wick_spec() -> None:
    space = SliceSpace.fock(4)
    spec = ActionSpec.from_hamiltonian(harmonic_hamiltonian(space), 3, 0.1)
    with pytest.raises(DimensionMismatchError):
        thermal_correlator_via_trace(spec, InsertionList.of((0, position_operator(space))))


def test_enumeration_is_thread_count_independent() -> None:
    _, ham = _harmonic_grid(dim=6)
    spec = ActionSpec.from_hamiltonian(ham, 6, 0.1)
    single = full_trace(spec, method="enumerate", threads=1)
    pooled = full_trace(spec, method="enumerate", threads=4)
    assert single == pooled
    assert single == pytest.approx(full_trace(spec, method="ring"), abs=1e-11)


def test_enumeration_respects_basis_budget() -> None:
    _, ham = _harmonic_grid(dim=6)
    spec = ActionSpec.from_hamiltonian(ham, 6, 0.1)
    with pytest.raises(SizeGuardError):
        full_trace(spec, method="enumerate", max_basis_states=1000)
    # auto falls back to the ring contraction instead
    assert full_trace(spec, method="auto", max_basis_states=1000) == pytest.approx(
        full_trace(spec, method="ring")
    )


def test_partial_trace_is_u_of_t() -> None:
    _, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 4, 0.25)
    exact = evolve(EvolutionSchedule.constant(ham, 1.0)).matrix
    enumerated = partial_trace_action(spec, method="enumerate").matrix
    ring = partial_trace_action(spec, method="ring").matrix
    np.testing.assert_allclose(enumerated, exact, atol=1e-12)
    np.testing.assert_allclose(ring, exact, atol=1e-12)


def test_traces_do_not_depend_on_the_slice_basis() -> None:
    rng = np.random.default_rng(11)
    space = SliceSpace.position_grid(4)
    ham = random_hermitian(space, rng)
    spec = ActionSpec.from_hamiltonian(ham, 3, 1.0 / 3.0)
    ref = full_trace(spec)
    for change in (dft_momentum_basis(space), eigenbasis(ham)):
        assert full_trace(spec.in_basis(change)) == pytest.approx(ref, rel=1e-10)


def test_identity_slices_leave_the_trace_alone() -> None:
    _, ham = _harmonic_grid(dim=4)
    spec = ActionSpec.from_hamiltonian(ham, 3, 1.0 / 3.0)
    padded = spec.with_identity_slices(2)
    assert padded.n_slices == 5
    assert full_trace(padded) == pytest.approx(full_trace(spec), rel=1e-12)


def test_interleaving_identity_two_segments() -> None:
    rng = np.random.default_rng(3)
    space = SliceSpace.position_grid(3)
    first, second = random_hermitian(space, rng), random_hermitian(space, rng)
    spec = ActionSpec.from_hamiltonians([first, first, second, second], 0.25)
    assert verify_interleaving_identity(spec) < 1e-10


def test_discrete_schrodinger_two_sided() -> None:
    _, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 3, 0.1)
    for q_in, q_out in [(0, 1), (3, 3), (5, 2)]:
        lhs, rhs = verify_discrete_schrodinger(spec, q_in, q_out)
        assert abs(lhs - rhs) < 1e-12


def test_discrete_schrodinger_needs_static_hamiltonian(rng: np.random.Generator) -> None:
    space = SliceSpace.position_grid(3)
    spec = ActionSpec.from_hamiltonians(
        [random_hermitian(space, rng), random_hermitian(space, rng)], 0.1
    )
    with pytest.raises(DimensionMismatchError):
        verify_discrete_schrodinger(spec, 0, 1)


def test_schrodinger_quotient_is_first_order() -> None:
    _, ham = _harmonic_grid()
    spec = ActionSpec.from_hamiltonian(ham, 3, 0.1)
    sweep = schrodinger_quotient_sweep(spec, 0, 1, [0.01, 0.005, 0.0025, 0.00125])
    assert sweep.order() == pytest.approx(1.0, abs=0.15)
    assert sweep.errors[-1] < sweep.errors[0]


@pytest.mark.parametrize("n_slices", [2, 3])
def test_legendre_phase_random_indices(n_slices: int) -> None:
    rng = np.random.default_rng(5)
    space = SliceSpace.position_grid(4)
    for _ in range(20):
        q = [int(v) for v in rng.integers(0, 4, size=n_slices)]
        p = [int(v) for v in rng.integers(0, 4, size=n_slices)]
        lhs, rhs = verify_legendre_phase(space, n_slices, q, p)
        assert abs(lhs - rhs) < 1e-12
        lhs, rhs = free_particle_action_phase(space, n_slices, 0.1, 1.0, q, p)
        assert abs(lhs - rhs) < 1e-12


def test_trotter_error_vanishes_without_potential() -> None:
    space = SliceSpace.position_grid(8, 0.25)
    table = trotter_order_experiment(space, lambda q: 0.0 * q, 1.0, 0.1, [0.1, 0.05])
    assert max(table.errors) < 1e-12


def test_trotter_split_step_is_first_order() -> None:
    space = SliceSpace.position_grid(32, 1.0 / 16.0)
    table = trotter_order_experiment(
        space,
        lambda q: q**4,
        1000.0,
        1.0,
        [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
    )
    assert table.order() == pytest.approx(1.0, abs=0.15)


def test_trotter_rejects_steps_that_do_not_divide_t() -> None:
    space = SliceSpace.position_grid(4)
    with pytest.raises(DimensionMismatchError):
        trotter_order_experiment(space, lambda q: q**2, 1.0, 1.0, [0.3])
