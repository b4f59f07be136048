"""Feynman propagator: closed form and the frequency-integral route."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from qaction.errors import NonConvergenceError, SingularConfigurationError

QUAD_LIMIT = 500


def feynman_propagator_closed(omega: float, dt: float) -> complex:
    """e^{-i omega |dt|} / (2 omega) for the sqrt(m)-normalized coordinate."""
    if not omega > 0:
        raise SingularConfigurationError(f"omega must be > 0, got {omega!r}")
    return complex(np.exp(-1j * omega * abs(dt)) / (2.0 * omega))


@dataclass(frozen=True)
class FrequencyIntegral:
    value: complex
    extrapolated: complex
    error_estimate: float
    eta: float
    cutoff: float

    def to_dict(self) -> dict:
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "extrapolated": {"re": self.extrapolated.real, "im": self.extrapolated.imag},
            "error_estimate": self.error_estimate,
            "eta": self.eta,
            "cutoff": self.cutoff,
        }


def _quad(func, lo: float, hi: float, dt: float, *, points=None) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            if points is not None or dt == 0:
                value, _ = scipy.integrate.quad(
                    lambda x: func(x) * math.cos(dt * x), lo, hi, points=points, limit=QUAD_LIMIT
                )
            else:
                value, _ = scipy.integrate.quad(
                    func, lo, hi, weight="cos", wvar=dt, limit=QUAD_LIMIT
                )
        except scipy.integrate.IntegrationWarning as exc:
            raise NonConvergenceError(
                f"quadrature on [{lo}, {hi}] did not converge",
                diagnostics={"interval": [lo, hi], "dt": dt, "reason": str(exc)},
            ) from exc
    return float(value)


def _tail(cutoff: float, dt: float) -> float:
    """int_cutoff^inf cos(x dt) / x^2 dx."""
    if dt == 0:
        return 1.0 / cutoff
    si, _ = scipy.special.sici(cutoff * dt)
    return math.cos(cutoff * dt) / cutoff - dt * (math.pi / 2.0 - si)


def _integral(omega: float, dt: float, eta: float, cutoff: float) -> complex:
    """(i/pi) int_0^inf cos(w dt) / (w^2 - omega^2 + i eta) dw, tail in closed form."""
    def re(x: float) -> float:
        d = x * x - omega * omega
        return d / (d * d + eta * eta)

    def im(x: float) -> float:
        d = x * x - omega * omega
        return -eta / (d * d + eta * eta)

    lo, hi = 0.5 * omega, 1.5 * omega
    total = 0.0 + 0.0j
    for part, scale in ((re, 1.0), (im, 1j)):
        value = _quad(part, 0.0, lo, dt)
        value += _quad(part, lo, hi, dt, points=[omega])
        value += _quad(part, hi, cutoff, dt)
        total += scale * value
    total += _tail(cutoff, dt)
    return complex(1j * total / math.pi)


def frequency_integral_DF(omega: float, dt: float, eta: float, cutoff: float) -> FrequencyIntegral:
    """(i / 2 pi) int dw e^{-i w dt} / (w^2 - omega^2 + i eta) over the real line.

    The error estimate is |I(eta) - I(eta/2)|; ``extrapolated`` is the
    first-order Richardson value 2 I(eta/2) - I(eta).
    """
    if not omega > 0:
        raise SingularConfigurationError(f"omega must be > 0, got {omega!r}")
    if not eta > 0:
        raise SingularConfigurationError(f"eta must be > 0, got {eta!r}")
    if not cutoff > 1.5 * omega:
        raise SingularConfigurationError(f"cutoff {cutoff} must exceed 1.5 * omega")
    dt = abs(float(dt))
    coarse = _integral(omega, dt, eta, cutoff)
    fine = _integral(omega, dt, eta / 2.0, cutoff)
    return FrequencyIntegral(coarse, 2.0 * fine - coarse, float(abs(fine - coarse)), eta, cutoff)
