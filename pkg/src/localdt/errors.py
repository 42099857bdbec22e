"""Exception hierarchy shared by all localdt modules."""

from __future__ import annotations


class LocalDTError(Exception):
    """Base class for every error raised by this package."""


class NotUnital(LocalDTError):
    pass


class NonzeroConstantTerm(LocalDTError):
    pass


class SpecializationError(LocalDTError):
    pass


class DivisionByZero(SpecializationError, ZeroDivisionError):
    pass


class NonIntegral(SpecializationError):
    pass


class OrderMismatch(LocalDTError):
    pass


class FanError(LocalDTError, ValueError):
    pass


class NotPrimitive(FanError):
    pass


class NotSmooth(FanError):
    pass


class NotComplete(FanError):
    pass


class NoIntegerSolution(FanError):
    pass


class NotAdjacent(FanError):
    pass


class ReductionNotNeeded(LocalDTError, ValueError):
    pass


class ParseError(LocalDTError, ValueError):
    pass


class SingularMatrix(LocalDTError):
    pass


class IllConditioned(LocalDTError):
    pass


class CheckFailed(LocalDTError):
    """A numeric verification did not pass; ``seed`` reproduces the failing draw."""

    def __init__(self, message: str, seed: int | None = None):
        super().__init__(message)
        self.seed = seed


class PartitionExceedsOrder(LocalDTError, ValueError):
    pass


class OutOfRange(LocalDTError, ValueError):
    pass
