"""Core vocabulary: trust/risk enumerations, labelled beliefs, intents, and
the configured risk classifier.

Everything here is an immutable value object, safe to share across threads
and to snapshot into audit records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Mapping

from .errors import InvalidBelief


class TrustLevel(IntEnum):
    """Binary trust verdict for a belief. Total order: Low < High."""

    Low = 0
    High = 1


class ProvenanceClass(IntEnum):
    """Source-assurance level of a belief, ordered by increasing assurance."""

    unknown = 0
    unverified = 1
    verified = 2
    attested = 3

    @classmethod
    def parse(cls, s: str) -> "ProvenanceClass":
        try:
            return cls[s]
        except KeyError:
            raise ValueError(f"not a provenance class: {s!r}") from None

    def format(self) -> str:
        return self.name


class RiskClass(IntEnum):
    """Consequence severity of an action. Total order: Low < High."""

    Low = 0
    High = 1


class IntentClass(Enum):
    """Content classification of an ingested payload."""

    Instructional = "Instructional"
    Factual = "Factual"
    Mixed = "Mixed"
    Unknown = "Unknown"


@dataclass(frozen=True)
class BeliefLabel:
    """Provenance metadata attached to every belief at ingress.

    `src` identifies the originating channel, `int_class` classifies the
    payload content, `age` is a millisecond timestamp, and `path` is the
    ordered list of channels the content travelled through.
    """

    src: str
    int_class: IntentClass
    age: int
    path: tuple[str, ...]


def validate_label(label: BeliefLabel) -> BeliefLabel:
    """Check label invariants; raises InvalidBelief naming the bad field."""
    if not label.src:
        raise InvalidBelief("src", "label src must be non-empty")
    if not label.path:
        raise InvalidBelief("path", "label path must be non-empty")
    if label.age < 0:
        raise InvalidBelief("age", "label age must be >= 0")
    return label


@dataclass(frozen=True)
class Belief:
    """A labelled proposition with an epistemic score and a provenance class."""

    id: str
    proposition: str
    label: BeliefLabel
    tau_epi: float
    tau_prov: ProvenanceClass


def validate_belief(b: Belief) -> Belief:
    """Return `b` unchanged if all invariants hold, else raise InvalidBelief."""
    if not 0.0 <= b.tau_epi <= 1.0:
        raise InvalidBelief("tau_epi", f"tau_epi must be in [0, 1], got {b.tau_epi}")
    validate_label(b.label)
    return b


@dataclass(frozen=True)
class ActionSpec:
    """An action an agent wants to perform: name, arguments, target resource."""

    name: str
    args: Mapping[str, str] = field(default_factory=dict)
    target: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("action name must be non-empty")


@dataclass(frozen=True)
class RiskTable:
    """Ordered name-pattern rules mapping actions to risk classes.

    Patterns are exact action names or a prefix with a single trailing '*'.
    The first matching rule wins; unmatched names get `default`.
    """

    rules: tuple[tuple[str, RiskClass], ...]
    default: RiskClass = RiskClass.Low

    def __post_init__(self):
        for pattern, _ in self.rules:
            if not pattern:
                raise ValueError("risk pattern must be non-empty")
            star = pattern.count("*")
            if star > 1 or (star == 1 and not pattern.endswith("*")):
                raise ValueError(
                    f"risk pattern must be exact or have one trailing '*': {pattern!r}"
                )


def _pattern_matches(pattern: str, name: str) -> bool:
    if pattern.endswith("*"):
        return name.startswith(pattern[:-1])
    return name == pattern


def classify_risk(action: ActionSpec, table: RiskTable) -> RiskClass:
    """Classify an action's risk by name. Total: unmatched names get the default.

    Dispatch is on the action name only; args and target never affect the result.
    """
    for pattern, risk in table.rules:
        if _pattern_matches(pattern, action.name):
            return risk
    return table.default


@dataclass(frozen=True)
class JustificationEntry:
    """One citation inside a justification: a belief id plus the label data
    snapshotted when the plan was recorded. Snapshot fields are None until a
    plan step fills them from the run's belief store."""

    belief_id: str
    label: BeliefLabel | None = None
    tau_epi: float | None = None
    tau_prov: ProvenanceClass | None = None


@dataclass(frozen=True)
class Justification:
    """The machine-parsable list of beliefs an intent consumed. May be empty;
    an empty justification is valid input and is penalized by policy, not
    rejected."""

    uses: tuple[JustificationEntry, ...] = ()

    @classmethod
    def citing(cls, *belief_ids: str) -> "Justification":
        """Build a justification that cites beliefs by id only (labels are
        snapshotted later, at plan time)."""
        return cls(tuple(JustificationEntry(bid) for bid in belief_ids))


@dataclass(frozen=True)
class Intent:
    """An externalized intention: the action tuple plus its justification."""

    action: ActionSpec
    just: Justification = field(default_factory=Justification)

    @property
    def args(self) -> Mapping[str, str]:
        return self.action.args

    @property
    def target(self) -> str:
        return self.action.target
