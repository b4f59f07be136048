"""The regularized mode product F(tau) and the tau -> 0+ scan.

Factor n is 1 - exp(i tau (omega_n - omega) - lam tau^3 omega_n^2), the
convergence factor being eps~ = lam tau^2. Products are accumulated as sums
of logarithms, growing the symmetric cutoff by doubling until the last
update and the tail certificate are both below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from qaction.errors import (
    DimensionMismatchError,
    NonConvergenceError,
    OutOfRegionError,
    SingularConfigurationError,
)
from qaction.oscillator.modes import check_pole, mode_factors

VARIANTS = ("inverse", "inverse_vacuum", "product", "product_vacuum")
RESONANCE_TOL = 1e-9
_BLOCK = 1 << 18


@dataclass(frozen=True)
class ScanConfig:
    omega: float = 1.0
    total_time: float = math.pi / 2.0
    lam: float = 1.0
    tau0: float = 0.1
    ratio: float = 0.5
    steps: int = 8
    tail_tolerance: float = 1e-12
    initial_cutoff: int = 64
    max_cutoff: int = 1 << 24

    def __post_init__(self) -> None:
        for name in ("omega", "total_time", "lam", "tau0", "tail_tolerance"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DimensionMismatchError(f"{name} must be finite and > 0, got {value!r}")
        if not 0 < self.ratio < 1:
            raise DimensionMismatchError(f"ratio must lie in (0, 1), got {self.ratio!r}")
        if self.steps < 1 or self.initial_cutoff < 1 or self.max_cutoff < self.initial_cutoff:
            raise DimensionMismatchError("steps, initial_cutoff and max_cutoff must be ordered > 0")

    def schedule(self) -> list[float]:
        return [self.tau0 * self.ratio**k for k in range(self.steps)]

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "total_time": self.total_time,
            "lam": self.lam,
            "tau0": self.tau0,
            "ratio": self.ratio,
            "steps": self.steps,
            "tail_tolerance": self.tail_tolerance,
            "initial_cutoff": self.initial_cutoff,
            "max_cutoff": self.max_cutoff,
        }


@dataclass(frozen=True)
class ProductEvaluation:
    tau: complex
    log_inverse: complex
    cutoff: int
    tail_bound: float
    last_update: float

    def value(self, variant: str, omega: float, total_time: float) -> complex:
        if variant not in VARIANTS:
            raise DimensionMismatchError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        log_value = self.log_inverse
        if variant.endswith("_vacuum"):
            log_value += -0.5j * omega * total_time
        if variant.startswith("product"):
            log_value = -log_value
        return complex(np.exp(log_value))


def target(variant: str, omega: float, total_time: float) -> complex:
    """Closed-form tau -> 0+ limit of each variant."""
    check_pole(omega, total_time)
    inverse_vacuum = 1.0 / (2j * math.sin(omega * total_time / 2.0))
    values = {
        "inverse": np.exp(0.5j * omega * total_time) * inverse_vacuum,
        "inverse_vacuum": inverse_vacuum,
    }
    values["product"] = 1.0 / values["inverse"]
    values["product_vacuum"] = 1.0 / values["inverse_vacuum"]
    if variant not in values:
        raise DimensionMismatchError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return complex(values[variant])


def _check_tau(cfg: ScanConfig, tau: complex) -> complex:
    tau = complex(tau)
    if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
        raise OutOfRegionError(f"tau must be finite, got {tau!r}")
    if (tau**3).real <= 0:
        raise OutOfRegionError(f"tau={tau} is outside the region Re(tau^3) > 0")
    if tau.imag == 0:
        turns = tau.real * cfg.omega / (2.0 * math.pi)
        if abs(turns - round(turns)) < RESONANCE_TOL:
            raise SingularConfigurationError(
                f"tau*omega = {tau.real * cfg.omega} is a multiple of 2*pi"
            )
    return tau


def _log_factors(cfg: ScanConfig, tau: complex, labels: np.ndarray) -> np.ndarray:
    freqs = 2.0 * np.pi * labels / cfg.total_time
    exponent = 1j * tau * (freqs - cfg.omega) - cfg.lam * tau**3 * freqs**2
    return np.log1p(-np.exp(exponent))


def _block_sum(cfg: ScanConfig, tau: complex, lo: int, hi: int) -> complex:
    """Sum of log factors for lo <= |n| <= hi, n != 0 unless lo == 0, paired +n/-n."""
    total = 0.0 + 0.0j
    if lo == 0:
        total += complex(_log_factors(cfg, tau, np.zeros(1))[0])
        lo = 1
    for start in range(lo, hi + 1, _BLOCK):
        n = np.arange(start, min(hi, start + _BLOCK - 1) + 1, dtype=float)
        paired = _log_factors(cfg, tau, n) + _log_factors(cfg, tau, -n)
        total += complex(np.sum(paired))
    return total


def tail_bound(cfg: ScanConfig, tau: complex, cutoff: int) -> float:
    """Bound on |sum_{|n| > K} log factor_n| from a geometric majorant.

    With r_n = exp(|Im tau| (omega_n + |omega|) - lam Re(tau^3) omega_n^2)
    and q = r_{K+2} / r_{K+1} the bound is 2 r_{K+1} / ((1 - q)(1 - r_{K+1})).
    The ratio is taken in log space since r_{K+1} underflows for large lam.
    """
    tau = complex(tau)

    def log_r(n: int) -> float:
        w = 2.0 * math.pi * n / cfg.total_time
        return abs(tau.imag) * (w + abs(cfg.omega)) - cfg.lam * (tau**3).real * w * w

    log_first, log_second = log_r(cutoff + 1), log_r(cutoff + 2)
    if log_first >= 0.0 or log_second >= log_first:
        return math.inf
    first = math.exp(log_first)
    if first == 0.0:
        return 0.0
    q = math.exp(log_second - log_first)
    return 2.0 * first / ((1.0 - q) * (1.0 - first))


def regularized_product(cfg: ScanConfig, tau: complex) -> ProductEvaluation:
    """Adaptive evaluation of log prod_n (1 - e^{i tau (omega_n - omega + i eps~ omega_n^2)})^-1."""
    tau = _check_tau(cfg, tau)
    cutoff = cfg.initial_cutoff
    log_sum = _block_sum(cfg, tau, 0, cutoff)
    history: list[float] = []
    while True:
        new_cutoff = 2 * cutoff
        if new_cutoff > cfg.max_cutoff:
            raise NonConvergenceError(
                f"regularized product at tau={tau} did not converge within cutoff {cfg.max_cutoff}",
                diagnostics={
                    "tau": {"re": tau.real, "im": tau.imag},
                    "cutoff": cutoff,
                    "last_updates": history[-4:],
                    "tail_bound": tail_bound(cfg, tau, cutoff),
                },
            )
        update = _block_sum(cfg, tau, cutoff + 1, new_cutoff)
        log_sum += update
        cutoff = new_cutoff
        change = abs(np.expm1(update))
        history.append(float(change))
        bound = tail_bound(cfg, tau, cutoff)
        if change < cfg.tail_tolerance and bound < cfg.tail_tolerance:
            return ProductEvaluation(tau, -log_sum, cutoff, bound, float(change))


def finite_mode_product(omega: float, total_time: float, n_slices: int, variant: str) -> complex:
    """The variant evaluated on the N grid modes at tau = eps and eps~ = 0."""
    eps = total_time / n_slices
    check_pole(omega, total_time)
    log_sum = complex(np.sum(np.log(mode_factors(n_slices, eps, omega))))
    evaluation = ProductEvaluation(eps, -log_sum, n_slices, 0.0, 0.0)
    return evaluation.value(variant, omega, total_time)


@dataclass(frozen=True)
class ScanRow:
    tau: float
    variant: str
    value: complex
    error: float
    cutoff: int
    tail_bound: float


@dataclass(frozen=True)
class ScanResult:
    config: ScanConfig
    rows: tuple[ScanRow, ...]
    targets: dict[str, complex] = field(default_factory=dict)

    def errors(self, variant: str) -> list[float]:
        return [row.error for row in self.rows if row.variant == variant]

    def tail_monotone(self, variant: str, tail: int = 4) -> bool:
        errs = self.errors(variant)[-tail:]
        return len(errs) == tail and all(b < a for a, b in zip(errs, errs[1:]))

    def best(self) -> ScanRow:
        return min(self.rows, key=lambda row: row.error)

    def monotone_variants(self, tail: int = 4) -> list[str]:
        return [v for v in VARIANTS if self.tail_monotone(v, tail)]


def conjecture_scan(cfg: ScanConfig, variants: Iterable[str] = VARIANTS) -> ScanResult:
    """|F(tau) - target| along the tau schedule for every variant."""
    schedule = cfg.schedule()
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise DimensionMismatchError("tau schedule must be strictly decreasing")
    variants = tuple(variants)
    targets = {v: target(v, cfg.omega, cfg.total_time) for v in variants}
    rows = []
    for tau in schedule:
        evaluation = regularized_product(cfg, tau)
        for v in variants:
            value = evaluation.value(v, cfg.omega, cfg.total_time)
            error = float(abs(value - targets[v]))
            rows.append(ScanRow(tau, v, value, error, evaluation.cutoff, evaluation.tail_bound))
    return ScanResult(cfg, tuple(rows), targets)


@dataclass(frozen=True)
class LambdaRow:
    lam: float
    tau: float
    variant: str
    value: complex
    target: complex
    cutoff: int


def lambda_comparison(
    cfg: ScanConfig, lams: Sequence[float], tau: float, variants: Iterable[str] = VARIANTS
) -> list[LambdaRow]:
    """F(tau) at one fixed tau for each lam; the tau -> 0+ target does not depend on lam."""
    if not lams:
        raise DimensionMismatchError("lams must be non-empty")
    variants = tuple(variants)
    rows = []
    for lam in lams:
        lam_cfg = replace(cfg, lam=float(lam))
        evaluation = regularized_product(lam_cfg, tau)
        for v in variants:
            value = evaluation.value(v, cfg.omega, cfg.total_time)
            goal = target(v, lam_cfg.omega, lam_cfg.total_time)
            rows.append(LambdaRow(float(lam), float(tau), v, value, goal, evaluation.cutoff))
    return rows


def lambda_value_spread(rows: Sequence[LambdaRow], variant: str) -> float:
    """Largest |F_lam(tau) - F_lam'(tau)| over the compared lam values."""
    values = [row.value for row in rows if row.variant == variant]
    return max((abs(a - b) for a in values for b in values), default=0.0)


@dataclass(frozen=True)
class ProbeRow:
    tau: complex
    value: complex
    cutoff: int
    tail_bound: float


def analyticity_probe(
    cfg: ScanConfig, samples: Sequence[complex], variant: str = "inverse"
) -> list[ProbeRow]:
    """Evaluate F at complex tau in Re(tau^3) > 0; every sample is checked first."""
    checked = [_check_tau(cfg, tau) for tau in samples]
    rows = []
    for tau in checked:
        evaluation = regularized_product(cfg, tau)
        value = evaluation.value(variant, cfg.omega, cfg.total_time)
        rows.append(ProbeRow(tau, value, evaluation.cutoff, evaluation.tail_bound))
    return rows


def cauchy_riemann_residual(
    cfg: ScanConfig, center: complex, h: float, variant: str = "inverse"
) -> float:
    """|dF/dx + i dF/dy| / |dF/dx| from a 2 x 2 square of side h centred at ``center``."""
    corners = [center + complex(dx, dy) * h / 2.0 for dy in (-1, 1) for dx in (-1, 1)]
    f00, f10, f01, f11 = (row.value for row in analyticity_probe(cfg, corners, variant))
    d_x = ((f10 - f00) + (f11 - f01)) / (2.0 * h)
    d_y = ((f01 - f00) + (f11 - f10)) / (2.0 * h)
    scale = abs(d_x)
    if scale == 0:
        return float(abs(d_x + 1j * d_y))
    return float(abs(d_x + 1j * d_y) / scale)
