"""Exception hierarchy shared across the package."""


class BeliefGateError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidBelief(BeliefGateError):
    """A belief violates a structural invariant; `field` names the culprit."""

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"invalid belief field: {field}")


class OutOfRange(BeliefGateError):
    """An epistemic score fell outside [0, 1]."""


class DanglingBeliefRef(BeliefGateError):
    """A justification cited a belief id unknown to the run."""

    def __init__(self, belief_id: str):
        self.belief_id = belief_id
        super().__init__(f"unknown belief id: {belief_id}")


class NoPrecedingPlan(BeliefGateError):
    """Execution was requested for an action that was never planned."""


class UnknownToken(BeliefGateError):
    """No pending decision exists for the given token."""


class AlreadyResolved(BeliefGateError):
    """The pending decision was already resolved; verdicts apply at most once."""


class Expired(BeliefGateError):
    """The pending decision passed its deadline and was auto-denied."""


class DuplicateToken(BeliefGateError):
    """A pending decision with this token is already queued."""


class SerializationError(BeliefGateError):
    """A record could not be encoded to the wire format."""


class InvariantViolation(BeliefGateError):
    """A record violates the log schema (missing field, seq regression, ...)."""


class ParseError(BeliefGateError):
    """A log line could not be decoded; carries the 1-based line number."""

    def __init__(self, line_no: int, cause: str):
        self.line_no = line_no
        self.cause = cause
        super().__init__(f"line {line_no}: {cause}")


class NotAnExec(BeliefGateError):
    """The referenced record is not an exec record."""


class MissingPlan(BeliefGateError):
    """An exec record has no preceding plan for its action (an audit finding)."""


class ScenarioError(BeliefGateError):
    """A scenario document is malformed or references undefined names."""


class BudgetExceeded(BeliefGateError):
    """Trace enumeration would exceed the configured sequence budget."""
