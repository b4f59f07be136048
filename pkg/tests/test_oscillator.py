import cmath
import math

import numpy as np
import pytest

from qaction.errors import InvalidSourceError, SingularConfigurationError
from qaction.experiments import load_template, run_experiment
from qaction.extended import ActionSpec, full_trace
from qaction.oracle import vacuum_amplitude
from qaction.oscillator import (
    ModeSpectrum,
    SourceSpec,
    classical_action_of_source,
    closed_form_partition,
    feynman_propagator_closed,
    frequency_integral_DF,
    generating_functional_discrete,
    generating_functional_sweep,
    green_convergence,
    green_function,
    green_lattice_residual,
    green_tail_majorant,
    massless_green_limit,
    mixing_identity_residual,
    mixing_matrix,
    mode_partition_product,
    source_shift_transform,
    vacuum_persistence_det,
)
from qaction.oscillator.modes import mode_factors
from qaction.slices import SliceSpace, harmonic_hamiltonian

QUARTER_TURN = math.pi / 2.0


def test_mode_spectrum_labels() -> None:
    assert ModeSpectrum.grid(4, 1.0).labels == (-2, -1, 0, 1)
    assert ModeSpectrum.symmetric(2, 1.0).labels == (-2, -1, 0, 1, 2)
    np.testing.assert_allclose(ModeSpectrum.grid(3, 2.0).frequencies, [-math.pi, 0.0, math.pi])


def test_partition_closed_form_spot_value() -> None:
    assert closed_form_partition(1.0, QUARTER_TURN) == pytest.approx(-1j / math.sqrt(2.0))


@pytest.mark.parametrize("n_slices", [1, 2, 3, 11, 101])
def test_mode_product_is_exact_for_every_slice_count(n_slices: int) -> None:
    eps = QUARTER_TURN / n_slices
    value = mode_partition_product(n_slices, eps, 1.0)
    assert abs(value - (-1j / math.sqrt(2.0))) < 1e-12


def test_partition_pole_is_singular() -> None:
    with pytest.raises(SingularConfigurationError):
        closed_form_partition(1.0, 2.0 * math.pi)
    with pytest.raises(SingularConfigurationError):
        mode_partition_product(4, math.pi / 2.0, 1.0)


def test_mixing_matrix_is_cyclic_shift_form() -> None:
    n, eps, omega = 5, 0.2, 1.3
    shift = np.roll(np.eye(n), 1, axis=0)
    expected = np.eye(n) - cmath.exp(-1j * omega * eps) * shift
    np.testing.assert_allclose(mixing_matrix(n, eps, omega).matrix, expected, atol=1e-13)


@pytest.mark.parametrize("n_slices", [2, 3, 8, 32])
def test_mixing_determinant_is_mode_product(n_slices: int) -> None:
    eps = QUARTER_TURN / n_slices
    det = mixing_matrix(n_slices, eps, 1.0).det()
    product = complex(np.prod(mode_factors(n_slices, eps, 1.0)))
    assert abs(det - product) < 1e-11
    assert abs(det - (1.0 - cmath.exp(-1j * QUARTER_TURN))) < 1e-11


def test_reduced_mixing_determinant_gives_vacuum_persistence() -> None:
    n_slices, eps = 8, QUARTER_TURN / 8
    reduced = mixing_matrix(n_slices, eps, 1.0).reduced()
    assert reduced.det() == pytest.approx(1.0, abs=1e-12)
    oracle = vacuum_amplitude(harmonic_hamiltonian(SliceSpace.fock(8)), QUARTER_TURN)
    assert abs(vacuum_persistence_det(n_slices, eps, 1.0) - oracle) < 1e-9


def test_action_mixes_creation_operators_linearly() -> None:
    assert mixing_identity_residual(3, 4, 1.0, 0.3) < 1e-10


def test_green_function_matches_periodic_solution() -> None:
    total, omega, delta = 1.0, 1.0, 0.3
    closed = -1j * math.cos(omega * (delta - total / 2.0)) / (
        2.0 * omega * math.sin(omega * total / 2.0)
    )
    assert abs(green_function(total, omega, 4000, delta) - closed) < 1e-4


@pytest.mark.parametrize("delta", [0.0, 0.3, 0.5])
def test_green_function_doubling_stays_under_tail_majorant(delta: float) -> None:
    cutoffs = (8, 16, 32, 64, 128)
    majorants = [green_tail_majorant(1.0, 1.0, k) for k in cutoffs]
    assert all(b < a for a, b in zip(majorants, majorants[1:]))
    for k, bound in zip(cutoffs, majorants):
        assert green_convergence(1.0, 1.0, k, delta) <= bound
    assert majorants[-1] < 1e-3


def test_green_tail_majorant_bounds_the_full_tail() -> None:
    closed = -1j * math.cos(1.0 * (0.3 - 0.5)) / (2.0 * math.sin(0.5))
    for k in (8, 32):
        assert abs(green_function(1.0, 1.0, k, 0.3) - closed) <= green_tail_majorant(1.0, 1.0, k)
    assert green_tail_majorant(1.0, 100.0, 1) == math.inf


def test_green_function_resonance_is_singular() -> None:
    with pytest.raises(SingularConfigurationError):
        green_function(1.0, 2.0 * math.pi, 8, 0.3)


def test_green_lattice_residual_is_second_order() -> None:
    coarse = green_lattice_residual(1.0, 1.0, 4, 64)
    fine = green_lattice_residual(1.0, 1.0, 4, 128)
    assert math.log2(coarse / fine) == pytest.approx(2.0, abs=0.2)


def test_massless_limit_without_zero_mode() -> None:
    soft = green_function(1.0, 1e-3, 4096, 0.3, exclude_zero_mode=True)
    assert abs(soft - massless_green_limit(1.0, 0.3)) < 1e-3


def test_feynman_propagator_closed_form() -> None:
    assert feynman_propagator_closed(2.0, -1.0) == pytest.approx(cmath.exp(-2j) / 4.0)
    with pytest.raises(SingularConfigurationError):
        feynman_propagator_closed(0.0, 1.0)


@pytest.mark.parametrize("dt", [0.5, 1.0])
def test_frequency_integral_reaches_closed_form(dt: float) -> None:
    result = frequency_integral_DF(1.0, dt, 1e-3, 1e3)
    assert abs(result.extrapolated - feynman_propagator_closed(1.0, dt)) < 1e-3
    assert result.error_estimate > 0


def test_frequency_integral_validates_regulator() -> None:
    with pytest.raises(SingularConfigurationError):
        frequency_integral_DF(1.0, 0.5, 0.0, 1e3)
    with pytest.raises(SingularConfigurationError):
        frequency_integral_DF(1.0, 0.5, 1e-3, 1.0)


def test_source_validation() -> None:
    with pytest.raises(InvalidSourceError):
        SourceSpec(1.0, 1.0)
    with pytest.raises(InvalidSourceError):
        SourceSpec(1.0, 1.0, samples=np.ones(2), fourier={1: 1.0, -1: 1.0})
    with pytest.raises(InvalidSourceError):
        SourceSpec(1.0, 1.0, fourier={1: 1.0j, -1: 1.0j})
    with pytest.raises(InvalidSourceError):
        SourceSpec(1.0, 1.0, samples=np.array([1.0, 0.5j]))
    with pytest.raises(InvalidSourceError):
        SourceSpec(1.0, -1.0, samples=np.ones(2))


def test_classical_action_of_constant_source() -> None:
    src = SourceSpec.constant(2.0, 1.5, 0.3)
    expected = 0.3**2 * 2.0 / (2.0 * 1.5**2)
    assert classical_action_of_source(src, 16) == pytest.approx(expected, rel=1e-10)


def test_classical_action_of_cosine_source() -> None:
    total, omega, amplitude = 2.0, 1.0, 0.1
    src = SourceSpec.cosine(total, omega, amplitude)
    first_mode = 2.0 * math.pi / total
    expected = amplitude**2 * total / (4.0 * (omega**2 - first_mode**2))
    assert classical_action_of_source(src) == pytest.approx(expected, rel=1e-12)
    # a time translation leaves |j_n| alone
    rotated = src.phase_rotated(0.7)
    assert classical_action_of_source(rotated) == pytest.approx(expected, rel=1e-12)


def test_regulator_damps_the_generating_functional() -> None:
    src = SourceSpec.cosine(2.0, 1.0, 0.1)
    undamped = classical_action_of_source(src)
    damped = classical_action_of_source(SourceSpec.cosine(2.0, 1.0, 0.1, eta=0.5))
    assert undamped.imag == pytest.approx(0.0, abs=1e-15)
    assert abs(abs(cmath.exp(1j * damped)) - 1.0) > 1e-9


def test_source_shift_action_is_tau_independent() -> None:
    src = SourceSpec.cosine(2.0, 1.0, 0.1)
    actions = [source_shift_transform(src, 64, tau).classical_action() for tau in (0.1, 1.0, 10)]
    for action in actions[1:]:
        assert action == pytest.approx(actions[0], rel=1e-12)
    assert actions[0] == pytest.approx(classical_action_of_source(src, 64), rel=1e-12)
    table = source_shift_transform(src, 64)
    assert float(np.max(table.partial_fraction_residuals)) < 1e-12


def test_generating_functional_matches_classical_action() -> None:
    src = SourceSpec.cosine(2.0, 1.0, 0.1, eta=0.5)
    sweep = generating_functional_sweep(src, 24, 64)
    assert sweep.verdict == "converged"
    assert sweep.relative_error < 1e-6
    assert len(sweep.points) == 3


def test_zero_source_gives_unit_generating_functional() -> None:
    src = SourceSpec.cosine(2.0, 1.0, 0.1, eta=0.2)
    assert generating_functional_discrete(src.scaled(0.0), 8, 16) == pytest.approx(1.0, abs=1e-12)


def test_classical_action_is_quadratic_in_the_source() -> None:
    for src in (SourceSpec.cosine(2.0, 1.0, 0.1, eta=0.1), SourceSpec.constant(2.0, 1.5, 0.3)):
        action = classical_action_of_source(src, 64)
        assert classical_action_of_source(src.scaled(2.0), 64) == pytest.approx(
            4.0 * action, rel=1e-12
        )


def test_regulator_ladder_approaches_a_pure_phase() -> None:
    record = run_experiment(load_template("generating-functional"))
    assert record.passed, [v.to_dict() for v in record.failed_verdicts()]
    gaps = record.results["modulus_gaps"]
    assert len(gaps) == 3
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert record.results["ladder_verdict"] == "converged"


@pytest.mark.parametrize("n_slices", [1, 4, 6])
def test_wick_rotated_mode_product_is_the_extended_trace(n_slices: int) -> None:
    beta = 1.0
    fock = harmonic_hamiltonian(SliceSpace.fock(60))
    trace = full_trace(ActionSpec.wick_rotated(fock, n_slices, beta), method="ring")
    product = mode_partition_product(n_slices, -1j * beta / n_slices, 1.0)
    assert abs(product - trace) < 1e-12
    assert abs(product - 1.0 / (2.0 * math.sinh(beta / 2.0))) < 1e-12
