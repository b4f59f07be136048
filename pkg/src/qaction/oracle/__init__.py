from qaction.oracle.canonical import (
    EvolutionSchedule,
    evolve,
    evolve_between,
    thermal_correlator,
    time_ordered_correlator,
    vacuum_amplitude,
    vacuum_two_point,
)

__all__ = [
    "EvolutionSchedule",
    "evolve",
    "evolve_between",
    "thermal_correlator",
    "time_ordered_correlator",
    "vacuum_amplitude",
    "vacuum_two_point",
]
