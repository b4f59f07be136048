from qaction.slices.operators import (
    annihilation,
    build_hamiltonian,
    centered_dft_matrix,
    creation,
    dft_momentum_basis,
    eigenbasis,
    harmonic_hamiltonian,
    harmonic_potential,
    identity,
    kinetic_operator,
    momentum_operator,
    position_operator,
    potential_operator,
    propagator_step,
    random_hermitian,
)
from qaction.slices.space import SliceKind, SliceOperator, SliceSpace

__all__ = [
    "SliceKind",
    "SliceOperator",
    "SliceSpace",
    "annihilation",
    "build_hamiltonian",
    "centered_dft_matrix",
    "creation",
    "dft_momentum_basis",
    "eigenbasis",
    "harmonic_hamiltonian",
    "harmonic_potential",
    "identity",
    "kinetic_operator",
    "momentum_operator",
    "position_operator",
    "potential_operator",
    "propagator_step",
    "random_hermitian",
]
