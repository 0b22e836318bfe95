"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CribmacError(Exception):
    """Base class for all package errors."""


class InvalidDistribution(CribmacError, ValueError):
    """A probability vector, kernel or table violates its invariants."""


class AbsoluteContinuityViolation(CribmacError, ValueError):
    """p(x) > 0 where the reference q(x) = 0."""


class AxisError(CribmacError, ValueError):
    """Unknown, duplicated or overlapping axis labels."""


class LengthMismatch(CribmacError, ValueError):
    pass


class DimensionMismatch(CribmacError, ValueError):
    pass


class LawVariantError(CribmacError, TypeError):
    """The input-law variant is not admissible for the requested scenario."""


class NoFeasibleLaw(CribmacError):
    """No candidate law induces the target output within tolerance."""


class TargetMismatch(CribmacError, ValueError):
    """Two laws that should share an output marginal do not."""


class GuardExceeded(CribmacError):
    """Exact enumeration would exceed the configured state budget."""


class InfeasibleLaw(CribmacError, ValueError):
    """The strict constraint H(X1|U) > I(U,X1;Z) fails (with margin)."""


class ZeroMarginal(CribmacError, ValueError):
    """A strategy decomposition needs P(x1) > 0 for every x1."""


class BoundViolation(CribmacError, AssertionError):
    """A proven inequality failed numerically; indicates a bug."""


class UnsupportedScenario(CribmacError, ValueError):
    """The requested operation has no definition for this scenario."""
