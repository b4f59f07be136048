from qaction.oscillator.green import (
    green_convergence,
    green_function,
    green_lattice_residual,
    green_tail_majorant,
    massless_green_limit,
)
from qaction.oscillator.modes import (
    ModeSpectrum,
    OneBodyMatrix,
    closed_form_partition,
    mixing_identity_residual,
    mixing_matrix,
    mode_partition_product,
    vacuum_persistence_det,
)
from qaction.oscillator.propagator import (
    FrequencyIntegral,
    feynman_propagator_closed,
    frequency_integral_DF,
)
from qaction.oscillator.source import (
    GeneratingFunctionalSweep,
    SourceShiftTable,
    SourceSpec,
    classical_action_of_source,
    generating_functional_discrete,
    generating_functional_sweep,
    source_shift_transform,
)

__all__ = [
    "FrequencyIntegral",
    "GeneratingFunctionalSweep",
    "ModeSpectrum",
    "OneBodyMatrix",
    "SourceShiftTable",
    "SourceSpec",
    "classical_action_of_source",
    "closed_form_partition",
    "feynman_propagator_closed",
    "frequency_integral_DF",
    "generating_functional_discrete",
    "generating_functional_sweep",
    "green_convergence",
    "green_function",
    "green_lattice_residual",
    "green_tail_majorant",
    "massless_green_limit",
    "mixing_identity_residual",
    "mixing_matrix",
    "mode_partition_product",
    "source_shift_transform",
    "vacuum_persistence_det",
]
