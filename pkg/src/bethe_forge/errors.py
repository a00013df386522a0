"""Exception types shared across the package."""

from __future__ import annotations


class BetheForgeError(Exception):
    """Base class for all package errors."""


class Singular(BetheForgeError, ZeroDivisionError):
    """A structure function (or product of them) hit a vanishing denominator."""

    def __init__(self, kind, x, y):
        self.kind = kind
        self.x = x
        self.y = y
        super().__init__(f"{kind}({x}, {y}) is singular")


class IndexOutOfRange(BetheForgeError, IndexError):
    pass


class ShapeMismatch(BetheForgeError, ValueError):
    pass


class SectorMismatch(BetheForgeError, ValueError):
    """Requested a monodromy entry that mixes the + and - sectors."""


class NoVacuumFound(BetheForgeError):
    pass


class DepthExceeded(BetheForgeError):
    pass


class DimensionTooLarge(BetheForgeError):
    pass


class ZeroVector(BetheForgeError):
    """A Bethe vector contraction produced the null vector."""


class PoleProximity(BetheForgeError):
    pass


class RapidityClash(BetheForgeError):
    pass


class IdentityViolation(BetheForgeError):
    """Raised by strict checks; carries the first offending entry."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"{report.identity} violated: {report.counterexample}")


class NoConvergence(BetheForgeError):
    """A Newton start failed to reach the root tolerance."""
