import numpy as np
import pytest
import scipy.linalg

from qaction.errors import DimensionMismatchError, InvalidPotentialError
from qaction.slices import (
    SliceOperator,
    SliceSpace,
    annihilation,
    build_hamiltonian,
    creation,
    dft_momentum_basis,
    harmonic_hamiltonian,
    harmonic_potential,
    kinetic_operator,
    momentum_operator,
    position_operator,
    potential_operator,
    propagator_step,
    random_hermitian,
)
from qaction.slices.space import momentum_labels


def test_slice_space_rejects_dim_below_two() -> None:
    with pytest.raises(DimensionMismatchError):
        SliceSpace.position_grid(1)
    with pytest.raises(DimensionMismatchError):
        SliceSpace.fock(1)


def test_position_grid_is_centered() -> None:
    space = SliceSpace.position_grid(4, 0.5)
    np.testing.assert_allclose(space.grid_points(), [-1.0, -0.5, 0.0, 0.5])


def test_momentum_labels_even_and_odd() -> None:
    assert momentum_labels(4).tolist() == [-2, -1, 0, 1]
    assert momentum_labels(5).tolist() == [-2, -1, 0, 1, 2]


def test_dft_basis_is_unitary_and_diagonalizes_kinetic() -> None:
    space = SliceSpace.position_grid(6, 0.5)
    fourier = dft_momentum_basis(space).matrix
    np.testing.assert_allclose(fourier.conj().T @ fourier, np.eye(6), atol=1e-13)
    kinetic = kinetic_operator(space, mass=2.0).matrix
    diagonal = fourier.conj().T @ kinetic @ fourier
    expected = np.diag(space.grid_momenta() ** 2 / 4.0)
    np.testing.assert_allclose(diagonal, expected, atol=1e-12)


def test_potential_must_be_finite_and_real() -> None:
    space = SliceSpace.position_grid(4, 0.5)
    with pytest.raises(InvalidPotentialError):
        potential_operator(space, lambda q: 1.0 / q)
    with pytest.raises(InvalidPotentialError):
        potential_operator(space, lambda q: 1j * q)


def test_propagator_step_matches_expm() -> None:
    space = SliceSpace.position_grid(6, 0.5)
    ham = build_hamiltonian(space, harmonic_potential(1.0, 1.3))
    step = propagator_step(ham, 0.2)
    assert step.is_unitary
    np.testing.assert_allclose(step.matrix, scipy.linalg.expm(-0.2j * ham.matrix), atol=1e-12)


@pytest.mark.parametrize(("a", "b"), [(0.2, 0.35), (-0.4, 0.1), (-0.3j, -0.2j)])
def test_propagator_steps_compose(a: complex, b: complex) -> None:
    space = SliceSpace.position_grid(6, 0.5)
    ham = build_hamiltonian(space, harmonic_potential(1.0, 1.3))
    composed = propagator_step(ham, a).matrix @ propagator_step(ham, b).matrix
    np.testing.assert_allclose(composed, propagator_step(ham, a + b).matrix, atol=1e-12)


def test_harmonic_grid_ground_level_is_half_omega() -> None:
    omega = 1.7
    space = SliceSpace.position_grid(128, 0.15)
    ham = build_hamiltonian(space, harmonic_potential(1.0, omega))
    levels = np.linalg.eigvalsh(ham.matrix)
    assert levels[0] == pytest.approx(omega / 2.0, abs=1e-8)
    assert levels[1] == pytest.approx(1.5 * omega, abs=1e-8)


def test_wick_step_is_not_labelled_unitary() -> None:
    ham = harmonic_hamiltonian(SliceSpace.fock(5))
    step = propagator_step(ham, -0.5j)
    assert step.kind == "general"
    np.testing.assert_allclose(np.diag(step.matrix).real, np.exp(-0.5 * (np.arange(5) + 0.5)))


def test_random_hermitian_is_seeded_and_hermitian() -> None:
    space = SliceSpace.position_grid(5)
    first = random_hermitian(space, np.random.default_rng(3)).matrix
    second = random_hermitian(space, np.random.default_rng(3)).matrix
    np.testing.assert_array_equal(first, second)
    np.testing.assert_allclose(first, first.conj().T)


def test_fock_ladder_operators() -> None:
    space = SliceSpace.fock(6, mass=2.0, omega=0.5)
    a, a_dag = annihilation(space).matrix, creation(space).matrix
    commutator = a @ a_dag - a_dag @ a
    # the truncation spoils only the last diagonal entry
    np.testing.assert_allclose(np.diag(commutator)[:-1], np.ones(5))
    levels = np.diag(harmonic_hamiltonian(space).matrix).real
    np.testing.assert_allclose(levels, 0.5 * (np.arange(6) + 0.5))
    x = position_operator(space).matrix
    assert (x @ x)[0, 0].real == pytest.approx(1.0 / (2.0 * 2.0 * 0.5))
    p = momentum_operator(space).matrix
    assert (p @ p)[0, 0].real == pytest.approx(2.0 * 0.5 / 2.0)


def test_fock_helpers_reject_grid_spaces() -> None:
    with pytest.raises(DimensionMismatchError):
        annihilation(SliceSpace.position_grid(4))
    with pytest.raises(DimensionMismatchError):
        kinetic_operator(SliceSpace.fock(4))


def test_labelled_unitary_is_checked() -> None:
    space = SliceSpace.position_grid(3)
    with pytest.raises(DimensionMismatchError):
        SliceOperator(space, 2.0 * np.eye(3), "bad", "unitary")
    with pytest.raises(DimensionMismatchError):
        SliceOperator(space, np.eye(4), "wrong shape")


def test_operator_matrices_are_read_only() -> None:
    op = position_operator(SliceSpace.position_grid(3))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 1.0
