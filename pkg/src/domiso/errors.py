"""Exception hierarchy shared by every domiso module."""

from __future__ import annotations


class DomisoError(Exception):
    """Base class; the CLI maps these to exit status 1."""


class SpecSyntaxError(DomisoError, ValueError):
    """Malformed product-spec string. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UniverseTooLarge(DomisoError):
    """The vertex universe exceeds the dense-representation limit."""


class BudgetExceeded(DomisoError):
    """An exhaustive routine was asked to work on an instance above its budget."""


class PreconditionError(DomisoError, ValueError):
    """Input violates an operation's stated precondition."""


class HypothesisViolation(PreconditionError):
    """The ratio condition required by the profile recursion does not hold."""

    def __init__(self, message: str, witness: frozenset[int]):
        super().__init__(message)
        self.witness = witness


class Indeterminate(DomisoError):
    """An interval comparison could not be decided at the maximum precision."""


class Refused(DomisoError):
    """The operation is well defined only on inputs of a different shape."""
