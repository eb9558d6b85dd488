"""Exceptions and non-exceptional outcome values shared across modules."""

from dataclasses import dataclass


class FixFreeError(ValueError):
    """Base class for every error raised by this package."""


class ParseError(FixFreeError):
    pass


class LevelCapExceeded(FixFreeError):
    pass


class KraftExceeded(FixFreeError):
    pass


class HypothesisNotMet(FixFreeError):
    pass


class PreconditionViolated(FixFreeError):
    pass


class OutOfRange(FixFreeError):
    pass


class InfiniteExpansion(FixFreeError):
    pass


class NotEulerian(FixFreeError):
    pass


class Disconnected(FixFreeError):
    pass


class NotClosedPath(FixFreeError):
    pass


class NotOneRegular(FixFreeError):
    pass


class NotKRegular(FixFreeError):
    pass


class MatchingFailed(AssertionError):
    """A perfect matching was missing where regularity guarantees one."""


class InternalShadowOverflow(AssertionError):
    """A greedy step ran out of free words where a counting argument forbids it."""


@dataclass(frozen=True)
class Impossible:
    """Proven nonexistence, with the reason that proves it."""

    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unsupported:
    """No answer within the configured limits; says nothing about existence."""

    reason: str

    def __bool__(self):
        return False
