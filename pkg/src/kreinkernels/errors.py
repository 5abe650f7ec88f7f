"""Exception hierarchy shared by every module.

Each error carries a ``kind`` string; the CLI renders failures as
``{"error": {"kind": ..., "detail": ...}}``.
"""

from __future__ import annotations


class KernelError(Exception):
    """Base class for all library errors."""

    kind = "KernelError"

    def to_dict(self) -> dict:
        return {"error": {"kind": self.kind, "detail": str(self)}}


class DomainError(KernelError, ValueError):
    kind = "DomainError"


class NonIntegrable(KernelError, ValueError):
    kind = "NonIntegrable"


class ToleranceNotReached(KernelError, RuntimeError):
    """Quadrature panel budget exhausted; ``result`` holds the best estimate."""

    kind = "ToleranceNotReached"

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class UnknownTail(KernelError, ValueError):
    kind = "UnknownTail"


class EmptyGrid(KernelError, ValueError):
    kind = "EmptyGrid"


class NumericalBreakdown(KernelError, ArithmeticError):
    kind = "NumericalBreakdown"


class SlowConvergence(KernelError, RuntimeError):
    kind = "SlowConvergence"


class MethodMismatch(KernelError, ValueError):
    kind = "MethodMismatch"


class ImaginaryLeak(KernelError, ArithmeticError):
    kind = "ImaginaryLeak"


class MeasureMismatch(KernelError, ValueError):
    kind = "MeasureMismatch"


class FactorizationFailed(KernelError, ArithmeticError):
    kind = "FactorizationFailed"


class InsufficientPaths(KernelError, ValueError):
    kind = "InsufficientPaths"


class DivergentSeries(KernelError, ArithmeticError):
    """Ratio test fails persistently (``Divergent`` / ``DivergentPoint``)."""

    kind = "Divergent"


class UsageError(KernelError, ValueError):
    kind = "UsageError"


class DivergentPoint(DivergentSeries):
    kind = "DivergentPoint"
