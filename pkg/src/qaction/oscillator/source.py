"""Driven oscillator: sources, the classical action and the generating functional."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
import scipy.linalg

from qaction.errors import DimensionMismatchError, InvalidSourceError
from qaction.extended.action import ActionSpec
from qaction.extended.traces import full_trace
from qaction.oscillator.green import check_resonance
from qaction.oscillator.modes import ModeSpectrum, check_pole
from qaction.slices.operators import annihilation
from qaction.slices.space import SliceOperator, SliceSpace

REALITY_TOL = 1e-12
DEFAULT_ACTION_CUTOFF = 20000


@dataclass(frozen=True, eq=False)
class SourceSpec:
    """A real source j(t) on [0, T] for the potential m w^2 q^2/2 - sqrt(m) j(t) q.

    Give either ``samples`` (piecewise constant, one value per slice of an
    N-slice grid) or ``fourier`` (j_n = int dt e^{i w_n t} j(t) / sqrt(T)).
    ``eta`` shifts the unperturbed frequency to omega - i eta.
    """

    total_time: float
    omega: float
    mass: float = 1.0
    samples: np.ndarray | None = None
    fourier: Mapping[int, complex] | None = field(default=None)
    eta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("total_time", "omega", "mass"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise InvalidSourceError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.eta) or self.eta < 0:
            raise InvalidSourceError(f"eta must be finite and >= 0, got {self.eta!r}")
        if (self.samples is None) == (self.fourier is None):
            raise InvalidSourceError("give exactly one of samples or fourier")
        if self.samples is not None:
            samples = np.asarray(self.samples)
            if samples.ndim != 1 or samples.size < 1:
                raise InvalidSourceError("samples must be a non-empty 1-d sequence")
            if np.iscomplexobj(samples) and np.max(np.abs(samples.imag)) > REALITY_TOL:
                raise InvalidSourceError("source samples must be real")
            if not np.all(np.isfinite(samples)):
                raise InvalidSourceError("source samples must be finite")
            samples = np.array(samples.real, dtype=float)
            samples.setflags(write=False)
            object.__setattr__(self, "samples", samples)
        else:
            coeffs = {int(n): complex(c) for n, c in self.fourier.items()}
            for n, c in coeffs.items():
                partner = coeffs.get(-n, 0.0)
                if abs(partner - c.conjugate()) > REALITY_TOL * max(1.0, abs(c)):
                    raise InvalidSourceError(f"j_{-n} must equal conj(j_{n}) for a real source")
            object.__setattr__(self, "fourier", coeffs)

    @classmethod
    def constant(
        cls, total_time: float, omega: float, value: float, n_slices: int = 1, **kwargs
    ) -> SourceSpec:
        return cls(total_time, omega, samples=np.full(n_slices, float(value)), **kwargs)

    @classmethod
    def cosine(
        cls, total_time: float, omega: float, amplitude: float, mode: int = 1, **kwargs
    ) -> SourceSpec:
        """j(t) = amplitude * cos(omega_mode t)."""
        if mode == 0:
            return cls.constant(total_time, omega, amplitude, **kwargs)
        half = amplitude * math.sqrt(total_time) / 2.0
        return cls(total_time, omega, fourier={mode: half, -mode: half}, **kwargs)

    @property
    def is_sampled(self) -> bool:
        return self.samples is not None

    def scaled(self, factor: float) -> SourceSpec:
        if self.samples is not None:
            return replace(self, samples=self.samples * factor)
        return replace(self, fourier={n: c * factor for n, c in self.fourier.items()})

    def phase_rotated(self, phi: float) -> SourceSpec:
        """j_n -> e^{i phi sign(n)} j_n, a time translation of a real source."""
        rotated = {n: c * np.exp(1j * phi * np.sign(n)) for n, c in self.coefficient_map().items()}
        return replace(self, samples=None, fourier=rotated)

    def coefficient_map(self, cutoff: int | None = None) -> dict[int, complex]:
        if self.fourier is not None:
            return dict(self.fourier)
        k = cutoff if cutoff is not None else DEFAULT_ACTION_CUTOFF
        labels = range(-k, k + 1)
        return dict(zip(labels, self.coefficients(np.asarray(labels))))

    def coefficients(self, labels: np.ndarray) -> np.ndarray:
        """j_n for each label n."""
        labels = np.asarray(labels, dtype=int)
        if self.fourier is not None:
            return np.array([self.fourier.get(int(n), 0.0) for n in labels], dtype=complex)
        n_steps = self.samples.size
        eps = self.total_time / n_steps
        freqs = 2.0 * np.pi * labels / self.total_time
        starts = eps * np.arange(n_steps)
        phases = np.exp(1j * np.outer(freqs, starts)) @ self.samples
        nonzero = labels != 0
        weight = np.full(labels.shape, eps, dtype=complex)
        weight[nonzero] = (np.exp(1j * freqs[nonzero] * eps) - 1.0) / (1j * freqs[nonzero])
        return phases * weight / math.sqrt(self.total_time)

    def samples_on(self, n_slices: int) -> np.ndarray:
        """Values of j held constant on each slice of an N-slice grid."""
        if self.samples is not None:
            if n_slices % self.samples.size:
                raise InvalidSourceError(
                    f"{n_slices} slices do not refine the {self.samples.size} source samples"
                )
            return np.repeat(self.samples, n_slices // self.samples.size)
        eps = self.total_time / n_slices
        mids = eps * (np.arange(n_slices) + 0.5)
        labels = np.array(sorted(self.fourier))
        freqs = 2.0 * np.pi * labels / self.total_time
        coeffs = np.array([self.fourier[int(n)] for n in labels])
        values = np.exp(-1j * np.outer(mids, freqs)) @ coeffs / math.sqrt(self.total_time)
        return values.real

    def discretized(self, n_slices: int) -> SourceSpec:
        """The piecewise-constant source that an N-slice trace actually sees."""
        return replace(self, samples=self.samples_on(n_slices), fourier=None)

    def to_dict(self) -> dict:
        out = {
            "total_time": self.total_time,
            "omega": self.omega,
            "mass": self.mass,
            "eta": self.eta,
        }
        if self.samples is not None:
            out["samples"] = [float(v) for v in self.samples]
        else:
            out["fourier"] = {
                str(n): {"re": c.real, "im": c.imag} for n, c in sorted(self.fourier.items())
            }
        return out


def classical_action_of_source(src: SourceSpec, cutoff: int = DEFAULT_ACTION_CUTOFF) -> complex:
    """S_cl[j] = -sum_n |j_n|^2 / (2 omega (omega_n - omega_c)), omega_c = omega - i eta.

    Summed with +n and -n paired: |j_n|^2 omega_c / (2 omega (omega_c^2 - omega_n^2)).
    For eta = 0 this is (1/2) sum_n |j_n|^2 / (omega^2 - omega_n^2).
    """
    spectrum = ModeSpectrum.symmetric(cutoff, src.total_time)
    freqs = spectrum.frequencies
    if src.eta == 0:
        check_resonance(src.omega, freqs)
    weights = np.abs(src.coefficients(np.asarray(spectrum.labels))) ** 2
    omega_c = src.omega - 1j * src.eta
    terms = weights * omega_c / (2.0 * src.omega * (omega_c**2 - freqs**2))
    return complex(np.sum(terms))


def driven_hamiltonian(space: SliceSpace, src: SourceSpec, value: float) -> np.ndarray:
    """(omega - i eta) a^dag a + omega/2 - value (a + a^dag) / sqrt(2 omega).

    Written for x = sqrt(m) q, so the mass drops out of the Fock matrices.
    """
    a = annihilation(space).matrix
    number = np.diag(np.arange(space.dim, dtype=float))
    omega_c = src.omega - 1j * src.eta
    coupling = value / math.sqrt(2.0 * src.omega)
    return omega_c * number + 0.5 * src.omega * np.eye(space.dim) - coupling * (a + a.conj().T)


def driven_action_spec(
    src: SourceSpec, fock_dim: int, n_slices: int, scale: float = 1.0
) -> ActionSpec:
    space = SliceSpace.fock(fock_dim, mass=src.mass, omega=src.omega)
    eps = src.total_time / n_slices
    cache: dict[float, SliceOperator] = {}
    steps = []
    for value in scale * src.samples_on(n_slices):
        key = float(value)
        if key not in cache:
            matrix = scipy.linalg.expm(-1j * eps * driven_hamiltonian(space, src, key))
            cache[key] = SliceOperator(space, matrix, f"U_j({key:.6g})")
        steps.append(cache[key])
    return ActionSpec.from_steps(space, steps, eps)


def generating_functional_discrete(src: SourceSpec, fock_dim: int, n_slices: int) -> complex:
    """Tr[e^{iS[j]}] / Tr[e^{iS[0]}] on N slices of a truncated Fock space."""
    if n_slices < 1:
        raise DimensionMismatchError("n_slices must be >= 1")
    check_pole(src.omega, src.total_time)
    driven = full_trace(driven_action_spec(src, fock_dim, n_slices), method="ring")
    free = full_trace(driven_action_spec(src, fock_dim, n_slices, scale=0.0), method="ring")
    return complex(driven / free)


@dataclass(frozen=True)
class GeneratingFunctionalSweep:
    """Trace ratios on a (d, N) refinement ladder against their closed forms.

    ``classical_action`` belongs to the piecewise-constant source actually
    traced at the base N, so the base comparison only carries Fock
    truncation error. ``continuum_action`` is S_cl of the source itself.
    """

    points: tuple[tuple[int, int, complex], ...]
    classical_action: complex
    continuum_action: complex
    tolerance: float
    slicing_tolerance: float

    @property
    def value(self) -> complex:
        return self.points[0][2]

    @property
    def truncation_delta(self) -> float:
        base_n = self.points[0][1]
        return max(
            (abs(z - self.value) for _, n, z in self.points[1:] if n == base_n), default=0.0
        )

    @property
    def slicing_delta(self) -> float | None:
        base_n = self.points[0][1]
        deltas = [abs(z - self.value) for _, n, z in self.points[1:] if n != base_n]
        return max(deltas) if deltas else None

    @property
    def verdict(self) -> str:
        if self.truncation_delta >= self.tolerance:
            return "inconclusive"
        slicing = self.slicing_delta
        if slicing is not None and slicing >= self.slicing_tolerance:
            return "inconclusive"
        return "converged"

    @property
    def closed_form(self) -> complex:
        return complex(np.exp(1j * self.classical_action))

    @property
    def error(self) -> float:
        return float(abs(self.value - self.closed_form))

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.closed_form)


def generating_functional_sweep(
    src: SourceSpec,
    fock_dim: int,
    n_slices: int,
    tolerance: float = 1e-8,
    slicing_tolerance: float = 1e-3,
    cutoff: int = DEFAULT_ACTION_CUTOFF,
) -> GeneratingFunctionalSweep:
    """Runs (d, N), (2d, N) and, for Fourier sources, (d, 2N)."""
    ladder = [(fock_dim, n_slices), (2 * fock_dim, n_slices)]
    if not src.is_sampled:
        ladder.append((fock_dim, 2 * n_slices))
    points = tuple((d, n, generating_functional_discrete(src, d, n)) for d, n in ladder)
    traced = classical_action_of_source(src.discretized(n_slices), cutoff)
    continuum = classical_action_of_source(src, cutoff)
    return GeneratingFunctionalSweep(points, traced, continuum, tolerance, slicing_tolerance)


@dataclass(frozen=True, eq=False)
class SourceShiftTable:
    """Per-mode displacements j_n / (sqrt(2 omega tau) (omega_n - omega))."""

    tau: float
    labels: np.ndarray
    frequencies: np.ndarray
    coefficients: np.ndarray
    displacements: np.ndarray
    partial_fraction_residuals: np.ndarray
    omega: float

    def classical_action(self) -> complex:
        """-tau sum_n (omega_n - omega) |d_n|^2, independent of tau."""
        return complex(
            -self.tau * np.sum((self.frequencies - self.omega) * np.abs(self.displacements) ** 2)
        )


def source_shift_transform(src: SourceSpec, cutoff: int, tau: float = 1.0) -> SourceShiftTable:
    if not math.isfinite(tau) or tau <= 0:
        raise DimensionMismatchError(f"tau must be > 0, got {tau!r}")
    spectrum = ModeSpectrum.symmetric(cutoff, src.total_time)
    freqs = spectrum.frequencies
    check_resonance(src.omega, freqs)
    labels = np.asarray(spectrum.labels)
    coeffs = src.coefficients(labels)
    omega = src.omega
    displacements = coeffs / (math.sqrt(2.0 * omega * tau) * (freqs - omega))
    partial = 1.0 / (freqs - omega) - 1.0 / (freqs + omega)
    residuals = np.abs(partial - 2.0 * omega / (freqs**2 - omega**2))
    return SourceShiftTable(tau, labels, freqs, coeffs, displacements, residuals, omega)
