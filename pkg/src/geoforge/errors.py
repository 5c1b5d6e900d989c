"""Exception types shared across the package."""

from __future__ import annotations


class GeoError(Exception):
    """Base class for all package errors."""


class ParseError(GeoError):
    """Syntax or validation failure while parsing text input.

    Carries the offending token and its byte offset in the source text.
    """

    def __init__(self, message: str, token: str = "", offset: int = -1):
        super().__init__(message)
        self.token = token
        self.offset = offset

    def __str__(self) -> str:
        base = super().__str__()
        if self.offset >= 0:
            return f"{base} (token {self.token!r} at byte {self.offset})"
        return base


class UnknownPredicate(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class UndeclaredPoint(ParseError):
    pass


class DuplicatePoint(ParseError):
    pass


class UnknownConstruction(ParseError):
    pass


class WrongArgCount(ParseError):
    pass


class DuplicateRuleName(ParseError):
    pass


class UnboundConclusionVariable(ParseError):
    pass


class DanglingDependency(GeoError):
    """A proof step cites a fact id not defined earlier in the record."""


class DegenerateInput(GeoError):
    """Numeric evaluation hit a degenerate configuration (e.g. zero-length line)."""


class NumericallyInfeasible(GeoError):
    """A sketch recipe found no real solution (e.g. disjoint circles)."""


class BuildFailed(GeoError):
    """Figure construction failed after retries.

    Attributes:
      step: index of the failing construction clause.
      reason: human-readable cause.
    """

    def __init__(self, step: int, reason: str):
        super().__init__(f"build failed at step {step}: {reason}")
        self.step = step
        self.reason = reason


class SamplingStuck(GeoError):
    """The script sampler exhausted its retry budget."""


class InvalidProposal(GeoError):
    """A proposer emitted a clause that fails to parse or build."""


class ProposerUnavailable(GeoError):
    """The external proposer process cannot be reached."""


class ReplayFailed(GeoError):
    """Record replay validation failed.

    Attributes:
      step: record id of the first failing step (-1 for structural failures).
    """

    def __init__(self, message: str, step: int = -1):
        super().__init__(message)
        self.step = step


class ClosureMismatch(GeoError):
    """Naive and optimized matching disagree on the saturated closure."""
