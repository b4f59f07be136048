from qaction.extended.action import (
    ActionSpec,
    InsertionList,
    action_matrix_element,
    apply_action,
    dense_action_matrix,
    dense_shift_matrix,
    dense_slicewise_matrix,
)
from qaction.extended.identities import (
    ConvergenceTable,
    free_particle_action_phase,
    schrodinger_quotient_sweep,
    trotter_order_experiment,
    verify_discrete_schrodinger,
    verify_interleaving_identity,
    verify_legendre_phase,
)
from qaction.extended.state import ExtendedState, apply_slicewise, apply_time_shift
from qaction.extended.traces import (
    correlator_via_trace,
    full_trace,
    partial_trace_action,
    propagator_via_trace,
    thermal_correlator_via_trace,
)

__all__ = [
    "ActionSpec",
    "ConvergenceTable",
    "ExtendedState",
    "InsertionList",
    "action_matrix_element",
    "apply_action",
    "apply_slicewise",
    "apply_time_shift",
    "correlator_via_trace",
    "dense_action_matrix",
    "dense_shift_matrix",
    "dense_slicewise_matrix",
    "free_particle_action_phase",
    "full_trace",
    "partial_trace_action",
    "propagator_via_trace",
    "schrodinger_quotient_sweep",
    "thermal_correlator_via_trace",
    "trotter_order_experiment",
    "verify_discrete_schrodinger",
    "verify_interleaving_identity",
    "verify_legendre_phase",
]
