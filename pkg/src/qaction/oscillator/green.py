"""Periodic Green function of the oscillator as a symmetric mode sum."""

from __future__ import annotations

import math

import numpy as np

from qaction.errors import SingularConfigurationError
from qaction.oscillator.modes import RESONANCE_RADIUS


def _positive_modes(total_time: float, cutoff: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(1, cutoff + 1, dtype=float) / total_time


def check_resonance(
    omega: float, frequencies: np.ndarray, radius: float = RESONANCE_RADIUS
) -> None:
    if frequencies.size == 0:
        return
    gap = float(np.min(np.abs(np.abs(frequencies) - abs(omega))))
    if gap < radius:
        raise SingularConfigurationError(
            f"omega={omega} is within {radius} of a mode frequency (gap {gap:.3e})"
        )


def green_function(
    total_time: float,
    omega: float,
    cutoff: int,
    delta: float | np.ndarray,
    *,
    exclude_zero_mode: bool = False,
) -> complex | np.ndarray:
    """G_K(delta) = sum_{|n| <= K} i e^{-i omega_n delta} / (T (omega_n^2 - omega^2)).

    The +n and -n terms are paired into a cosine before summation.
    """
    positive = _positive_modes(total_time, cutoff)
    check_resonance(omega, positive)
    if not exclude_zero_mode:
        check_resonance(omega, np.zeros(1))
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    pairs = 2.0 * np.cos(np.outer(d, positive)) / (positive**2 - omega**2)
    total = np.sum(pairs, axis=1)
    if not exclude_zero_mode:
        total = total - 1.0 / omega**2
    values = 1j * total / total_time
    return complex(values[0]) if np.ndim(delta) == 0 else values


def massless_green_limit(total_time: float, delta: float | np.ndarray) -> complex | np.ndarray:
    """Cutoff-free omega -> 0 sum without the zero mode, a quadratic in delta.

    sum_{n>=1} cos(n x) / n^2 = pi^2/6 - pi x/2 + x^2/4 for x in [0, 2 pi].
    """
    x = np.mod(2.0 * np.pi * np.asarray(delta, dtype=float) / total_time, 2.0 * np.pi)
    series = math.pi**2 / 6.0 - math.pi * x / 2.0 + x**2 / 4.0
    values = 1j * 2.0 * (total_time / (2.0 * math.pi)) ** 2 * series / total_time
    return complex(values) if np.ndim(delta) == 0 else values


def green_convergence(total_time: float, omega: float, cutoff: int, delta: float) -> float:
    """|G_K(delta) - G_2K(delta)|."""
    coarse = green_function(total_time, omega, cutoff, delta)
    fine = green_function(total_time, omega, 2 * cutoff, delta)
    return float(abs(fine - coarse))


def green_tail_majorant(total_time: float, omega: float, cutoff: int) -> float:
    """Bound on |G(delta) - G_K(delta)| uniform in delta.

    |cos| <= 1 and 1/(omega_n^2 - omega^2) decreasing for omega_K > omega give
    (1/T) sum_{n>K} 2/(omega_n^2 - omega^2) <= ln((omega_K + w)/(omega_K - w)) / (2 pi w).
    Partial sums of the paired cosines oscillate; this bound does not.
    """
    w = abs(omega)
    top = 2.0 * math.pi * cutoff / total_time
    if top <= w:
        return math.inf
    if w == 0:
        return 1.0 / (math.pi * top)
    return math.log1p(2.0 * w / (top - w)) / (2.0 * math.pi * w)


def discrete_delta(total_time: float, cutoff: int, delta: np.ndarray) -> np.ndarray:
    """(1/T) sum_{|n| <= K} e^{-i omega_n delta}."""
    positive = _positive_modes(total_time, cutoff)
    return (1.0 + np.sum(2.0 * np.cos(np.outer(delta, positive)), axis=1)) / total_time


def green_lattice_residual(total_time: float, omega: float, cutoff: int, n_slices: int) -> float:
    """max_j |(D^2 + omega^2) G_K + i delta_K| on the periodic slice grid.

    D^2 is the central second difference with step T/N, so the residual is
    O(eps^2) while the cutoff stays well below N/2.
    """
    eps = total_time / n_slices
    grid = eps * np.arange(n_slices)
    g = np.asarray(green_function(total_time, omega, cutoff, grid))
    laplacian = (np.roll(g, -1) - 2.0 * g + np.roll(g, 1)) / eps**2
    residual = laplacian + omega**2 * g + 1j * discrete_delta(total_time, cutoff, grid)
    return float(np.max(np.abs(residual)))
