"""Experiment names, descriptions and declared parameters.

The catalog is pure data; ``qaction.experiments.runners`` maps each name
to the function that executes it.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass

REQUIRED = object()

# int, float, str, bool, int_list, float_list, complex_list or source
ParamKind = str


@dataclass(frozen=True)
class Param:
    name: str
    kind: ParamKind
    default: object = REQUIRED
    minimum: float | None = None
    positive: bool = False
    choices: tuple[str, ...] | None = None

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


@dataclass(frozen=True)
class ExperimentEntry:
    name: str
    description: str
    params: tuple[Param, ...]
    randomized: bool = False
    # (dim param, slices param) checked against max_basis_states when enumerating
    budget: tuple[str, str] | None = None
    dense: bool = False

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def required_params(self) -> list[str]:
        return [p.name for p in self.params if p.required]


def _budget_params() -> tuple[Param, ...]:
    return (
        Param("max_basis_states", "int", 2**20, minimum=1),
        Param("method", "str", "auto", choices=("auto", "enumerate", "ring")),
    )


_TRACE = _budget_params()

CATALOG: dict[str, ExperimentEntry] = {
    entry.name: entry
    for entry in (
        ExperimentEntry(
            "propagator-identity",
            "Tr[e^{iS} |q>_0<q'|] against <q'|U(T)|q> from the canonical oracle",
            (
                Param("dim", "int", 8, minimum=2),
                Param("n_slices", "int", 4, minimum=1),
                Param("total_time", "float", 1.0, positive=True),
                Param("hamiltonian", "str", "random", choices=("random", "harmonic")),
                Param("omega", "float", 1.0, positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("spacing", "float", 1.0, positive=True),
                Param("pairs", "int", 5, minimum=1),
                Param("tolerance", "float", 1e-10, positive=True),
                *_TRACE,
            ),
            randomized=True,
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "correlator-identity",
            "Trace with position insertions against the time-ordered correlator",
            (
                Param("dim", "int", 6, minimum=2),
                Param("n_slices", "int", 4, minimum=2),
                Param("total_time", "float", 1.0, positive=True),
                Param("omega", "float", positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("spacing", "float", 0.5, positive=True),
                Param("insertion_slices", "int_list", [1, 2]),
                Param("tolerance", "float", 1e-10, positive=True),
                *_TRACE,
            ),
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "trace-identity",
            "Tr over the extended space of e^{iS} against Tr[U(T)]; Wick-rotated sweep",
            (
                Param("dim", "int", 6, minimum=2),
                Param("n_slices", "int", 4, minimum=1),
                Param("total_time", "float", 1.0, positive=True),
                Param("omega", "float", positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("spacing", "float", 0.5, positive=True),
                Param("beta", "float", 1.0, positive=True),
                Param("fock_dim", "int", 40, minimum=2),
                Param("tolerance", "float", 1e-12, positive=True),
                Param("truncation_tolerance", "float", 1e-8, positive=True),
                *_TRACE,
            ),
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "thermal-correlator",
            "Wick-rotated trace ratio with insertions against the thermal correlator",
            (
                Param("fock_dim", "int", 16, minimum=2),
                Param("n_slices", "int", 4, minimum=2),
                Param("beta", "float", 2.0, positive=True),
                Param("omega", "float", positive=True),
                Param("insertion_slices", "int_list", [0, 2]),
                Param("tolerance", "float", 1e-10, positive=True),
                *_TRACE,
            ),
            budget=("fock_dim", "n_slices"),
        ),
        ExperimentEntry(
            "partial-trace",
            "Trace over slices 1..N-1 of e^{iS} against U(T)",
            (
                Param("dim", "int", 6, minimum=2),
                Param("n_slices", "int", 4, minimum=1),
                Param("total_time", "float", 1.0, positive=True),
                Param("omega", "float", positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("spacing", "float", 0.5, positive=True),
                Param("tolerance", "float", 1e-12, positive=True),
                *_TRACE,
            ),
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "basis-independence",
            "Full traces in the position, momentum and energy bases agree",
            (
                Param("dim", "int", 4, minimum=2),
                Param("n_slices", "int", 3, minimum=1),
                Param("total_time", "float", 1.0, positive=True),
                Param("tolerance", "float", 1e-10, positive=True),
                *_TRACE,
            ),
            randomized=True,
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "interleaving-identity",
            "Dense e^{iS} against U_0(T) V^dag e^{iP eps} V for a two-segment H(t)",
            (
                Param("dim", "int", 3, minimum=2),
                Param("n_slices", "int", 4, minimum=2),
                Param("epsilon", "float", 0.25, positive=True),
                Param("max_basis_states", "int", 4096, minimum=1),
                Param("tolerance", "float", 1e-10, positive=True),
            ),
            randomized=True,
            budget=("dim", "n_slices"),
            dense=True,
        ),
        ExperimentEntry(
            "discrete-schrodinger",
            "One extra slice of evolution against the oracle difference; quotient limit",
            (
                Param("dim", "int", 6, minimum=2),
                Param("n_slices", "int", 3, minimum=1),
                Param("epsilon", "float", 0.1, positive=True),
                Param("omega", "float", positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("spacing", "float", 0.5, positive=True),
                Param("deltas", "float_list", [0.01, 0.005, 0.0025, 0.00125]),
                Param("q_in", "int", 0, minimum=0),
                Param("q_out", "int", 1, minimum=0),
                Param("tolerance", "float", 1e-12, positive=True),
                Param("order_tolerance", "float", 0.15, positive=True),
                *_TRACE,
            ),
            budget=("dim", "n_slices"),
        ),
        ExperimentEntry(
            "legendre-phase",
            "<q|e^{iP eps}|p> against exp(i sum p dq) <q|p>, plus the free-particle phase",
            (
                Param("dim", "int", 4, minimum=2),
                Param("slice_counts", "int_list", [2, 3]),
                Param("samples", "int", 20, minimum=1),
                Param("spacing", "float", 1.0, positive=True),
                Param("epsilon", "float", 0.1, positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("tolerance", "float", 1e-12, positive=True),
            ),
            randomized=True,
        ),
        ExperimentEntry(
            "trotter-order",
            "Global error of the split step against exact evolution; fitted order",
            (
                Param("dim", "int", 32, minimum=2),
                Param("spacing", "float", 0.0625, positive=True),
                # eps times the largest kinetic eigenvalue stays below 1 on this grid
                Param("mass", "float", 1000.0, positive=True),
                Param("total_time", "float", 1.0, positive=True),
                Param("potential", "str", "quartic", choices=("quartic", "harmonic")),
                Param("coupling", "float", 1.0, positive=True),
                Param("epsilons", "float_list", [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]),
                Param("expected_order", "float", 1.0, positive=True),
                Param("order_tolerance", "float", 0.15, positive=True),
            ),
        ),
        ExperimentEntry(
            "partition-product",
            "Vacuum-weighted mode product against 1/(2i sin(omega T/2))",
            (
                Param("omega", "float", positive=True),
                Param("total_time", "float", math.pi / 2.0, positive=True),
                Param("slice_counts", "int_list", [3, 11, 101]),
                Param("tolerance", "float", 1e-12, positive=True),
            ),
        ),
        ExperimentEntry(
            "finite-product",
            "Finite mode product at tau = eps against the closed form of every variant",
            (
                Param("omega", "float", positive=True),
                Param("total_time", "float", math.pi / 2.0, positive=True),
                Param("slice_counts", "int_list", [1, 3, 5, 11, 21, 51, 101]),
                Param("tolerance", "float", 1e-12, positive=True),
            ),
        ),
        ExperimentEntry(
            "determinant-duality",
            "det M(eps) against the mode product; vacuum persistence against the oracle",
            (
                Param("omega", "float", positive=True),
                Param("total_time", "float", math.pi / 2.0, positive=True),
                Param("slice_counts", "int_list", [2, 3, 4, 8, 16, 32, 64]),
                Param("fock_dim", "int", 8, minimum=2),
                Param("mixing_slices", "int", 3, minimum=1),
                Param("mixing_fock_dim", "int", 4, minimum=2),
                Param("tolerance", "float", 1e-11, positive=True),
                Param("vacuum_tolerance", "float", 1e-9, positive=True),
                Param("mixing_tolerance", "float", 1e-10, positive=True),
                Param("max_basis_states", "int", 4096, minimum=1),
            ),
            budget=("mixing_fock_dim", "mixing_slices"),
            dense=True,
        ),
        ExperimentEntry(
            "green-function",
            "Periodic Green function: cutoff convergence and the lattice equation residual",
            (
                Param("total_time", "float", 1.0, positive=True),
                Param("omega", "float", positive=True),
                Param("delta", "float", 0.3),
                Param("cutoffs", "int_list", [8, 16, 32, 64, 128]),
                Param("lattice_cutoff", "int", 4, minimum=1),
                Param("lattice_slices", "int_list", [32, 64, 128, 256]),
                Param("tail_tolerance", "float", 1e-3, positive=True),
                Param("order_tolerance", "float", 0.2, positive=True),
            ),
        ),
        ExperimentEntry(
            "generating-functional",
            "Driven-to-free trace ratio against exp(i S_cl[j]) on an (eta, d, N) ladder",
            (
                Param("total_time", "float", 2.0, positive=True),
                Param("omega", "float", positive=True),
                Param("mass", "float", 1.0, positive=True),
                Param("etas", "float_list", [0.5, 0.2, 0.1]),
                Param("fock_dims", "int_list", [24, 48, 96]),
                Param("n_slices", "int", 64, minimum=1),
                Param("source", "source", {"kind": "cosine", "amplitude": 0.1, "mode": 1}),
                Param("eta_trend", "float_list", [0.5, 0.1, 0.01, 0.0]),
                Param("taus", "float_list", [0.1, 1.0, 10.0]),
                Param("shift_cutoff", "int", 64, minimum=1),
                Param("tolerance", "float", 1e-6, positive=True),
                Param("ladder_tolerance", "float", 1e-8, positive=True),
                Param("slicing_tolerance", "float", 1e-3, positive=True),
                Param("tau_tolerance", "float", 1e-12, positive=True),
            ),
        ),
        ExperimentEntry(
            "source-shift",
            "Mode displacements of the source shift; tau independence of S_cl",
            (
                Param("total_time", "float", 2.0, positive=True),
                Param("omega", "float", positive=True),
                Param("source", "source", {"kind": "cosine", "amplitude": 0.1, "mode": 1}),
                Param("cutoff", "int", 64, minimum=1),
                Param("taus", "float_list", [0.1, 1.0, 10.0]),
                Param("tolerance", "float", 1e-12, positive=True),
            ),
        ),
        ExperimentEntry(
            "feynman-propagator",
            "Closed-form D_F against the Fock oracle and the regulated frequency integral",
            (
                Param("omega", "float", positive=True),
                Param("fock_dim", "int", 40, minimum=2),
                Param("time_deltas", "float_list", [0.0, 0.5, 1.0, 2.0]),
                Param("eta", "float", 1e-3, positive=True),
                Param("cutoff", "float", 1e3, positive=True),
                Param("oracle_tolerance", "float", 1e-8, positive=True),
                Param("integral_tolerance", "float", 1e-3, positive=True),
            ),
        ),
        ExperimentEntry(
            "conjecture-scan",
            "|F(tau) - target| along tau0 * ratio^k for every product variant",
            (
                Param("omega", "float", 1.0, positive=True),
                Param("total_time", "float", math.pi / 2.0, positive=True),
                Param("lam", "float", 1.0, positive=True),
                Param("tau0", "float", 0.1, positive=True),
                Param("ratio", "float", 0.5, positive=True),
                Param("steps", "int", 8, minimum=1),
                Param("tail_tolerance", "float", 1e-12, positive=True),
                Param("initial_cutoff", "int", 64, minimum=1),
                Param("max_cutoff", "int", 1 << 24, minimum=1),
                Param("monotone_tail", "int", 4, minimum=2),
                Param("lams", "float_list", [0.1, 1.0, 10.0]),
                Param("lambda_tau", "float", 0.01, positive=True),
                Param("lambda_spread_min", "float", 1e-9, positive=True),
                Param("tolerance", "float", 5e-3, positive=True),
            ),
        ),
        ExperimentEntry(
            "analyticity-probe",
            "F at complex tau in Re(tau^3) > 0 and a Cauchy-Riemann residual",
            (
                Param("omega", "float", 1.0, positive=True),
                Param("total_time", "float", math.pi / 2.0, positive=True),
                Param("lam", "float", 1.0, positive=True),
                Param("tail_tolerance", "float", 1e-12, positive=True),
                Param("initial_cutoff", "int", 64, minimum=1),
                Param("max_cutoff", "int", 1 << 24, minimum=1),
                Param(
                    "samples",
                    "complex_list",
                    [[0.1, 0.0], [0.1, 0.02], [0.1, -0.02], [0.08, 0.03]],
                ),
                Param("variant", "str", "inverse", choices=("inverse", "inverse_vacuum")),
                Param("center", "complex_list", [[0.1, 0.01]]),
                Param("step", "float", 1e-4, positive=True),
                Param("tolerance", "float", 1e-5, positive=True),
            ),
        ),
    )
}


def experiment_names() -> list[str]:
    return sorted(CATALOG)


def suggest(name: str) -> str | None:
    matches = difflib.get_close_matches(name, experiment_names(), n=1)
    return matches[0] if matches else None


def describe(entry: ExperimentEntry) -> str:
    required = ", ".join(entry.required_params()) or "none"
    seed = "; seed required" if entry.randomized else ""
    return f"{entry.name}: {entry.description} (required params: {required}{seed})"
