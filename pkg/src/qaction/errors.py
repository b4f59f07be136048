"""Exception hierarchy shared by every qaction module.

Validation problems subclass ``ValueError`` and numerical failures subclass
``ArithmeticError`` so callers that only know the builtin families still
catch them. The CLI maps them onto exit codes (see ``qaction.cli``).
"""

from __future__ import annotations


class QActionError(Exception):
    """Base class for qaction errors."""


class ConfigValidationError(QActionError, ValueError):
    """Raised when an experiment config fails validation."""


class InvalidPotentialError(QActionError, ValueError):
    """Raised when a potential is not finite on every grid point."""


class DimensionMismatchError(QActionError, ValueError):
    """Raised when operators, states or slice lists disagree in shape."""


class InvalidSourceError(QActionError, ValueError):
    """Raised when a source is not real or its samples do not fit the slicing."""


class SingularConfigurationError(QActionError, ValueError):
    """Raised near resonances, poles and singular reduced matrices."""


class OutOfRegionError(QActionError, ValueError):
    """Raised for complex time scales outside Re(tau^3) > 0."""


class SizeGuardError(QActionError, ValueError):
    """Raised when dense assembly or enumeration exceeds its budget."""


class NumericalError(QActionError, ArithmeticError):
    """Raised when a decomposition fails; carries a condition report."""

    def __init__(self, message: str, *, condition: str = "") -> None:
        super().__init__(message if not condition else f"{message} ({condition})")
        self.condition = condition


class NonConvergenceError(QActionError, ArithmeticError):
    """Raised when an adaptive cutoff or quadrature exhausts its budget."""

    def __init__(self, message: str, *, diagnostics: dict | None = None) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
