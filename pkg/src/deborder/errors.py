"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class DeborderError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(DeborderError, ZeroDivisionError):
    pass


class LimitUndefined(DeborderError):
    """A quantity has negative valuation, so its limit at eps = 0 does not exist.

    ``subset`` names the offending monomial / minor (0-based column indices)
    when the failure is attached to one.
    """

    def __init__(self, message: str, subset: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subset = subset


class NonSquare(DeborderError, ValueError):
    pass


class DimensionMismatch(DeborderError, ValueError):
    pass


class RankError(DeborderError, ValueError):
    """Common parent of the rank precondition failures."""


class RankTooHigh(RankError):
    pass


class RankDeficient(RankError):
    pass


class RankMismatch(RankError):
    pass


class NoWitness(DeborderError):
    """The valuated exchange axiom failed; never expected for linear matroids."""


class EmptyBaseFamily(DeborderError, ValueError):
    pass


class NoCommonBase(DeborderError, ValueError):
    pass


class CertificateFailure(DeborderError, RuntimeError):
    """An internal self-check failed. Always a bug, never bad input."""


class InstanceTooLarge(DeborderError, ValueError):
    pass
