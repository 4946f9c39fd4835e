"""Trust aggregation: maps (epistemic score, provenance class) to a binary
trust level, labels ingress channels, and evaluates whole justifications.

The aggregator is deliberately monotone: strengthening evidence or provenance
can never lower the result. The enforcement guarantees downstream depend on
that property, so it is pinned by property tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Set

from .domain import (
    BeliefLabel,
    IntentClass,
    Justification,
    ProvenanceClass,
    TrustLevel,
    validate_label,
)
from .errors import DanglingBeliefRef, InvalidBelief, OutOfRange

DEFAULT_THETA = 0.5
DEFAULT_HIGH_PROV = frozenset({ProvenanceClass.attested, ProvenanceClass.verified})


class Attestation(Enum):
    """How a channel's content was vouched for at ingress."""

    signed_attested = "signed_attested"
    signed_verified = "signed_verified"
    unsigned = "unsigned"
    unknown_source = "unknown_source"


_ATTESTATION_TO_PROV = {
    Attestation.signed_attested: ProvenanceClass.attested,
    Attestation.signed_verified: ProvenanceClass.verified,
    Attestation.unsigned: ProvenanceClass.unverified,
    Attestation.unknown_source: ProvenanceClass.unknown,
}


@dataclass(frozen=True)
class TrustConfig:
    """Run-level trust policy: the evidence threshold plus the set of
    provenance classes eligible for High trust.

    `high_prov_set` must be upward-closed in the assurance order; otherwise a
    better-attested source could score worse than a weaker one.
    """

    theta: float = DEFAULT_THETA
    high_prov_set: frozenset[ProvenanceClass] = DEFAULT_HIGH_PROV

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")
        for p in self.high_prov_set:
            for q in ProvenanceClass:
                if q >= p and q not in self.high_prov_set:
                    raise ValueError(
                        "high_prov_set must be upward-closed in assurance order"
                    )


@dataclass(frozen=True)
class TrustEval:
    """The trust evaluation of one cited belief, as frozen into audit records.

    `unverifiable` marks citations that could not be resolved or validated;
    those are conservatively Low.
    """

    belief_id: str
    label: BeliefLabel
    tau_epi: float
    tau_prov: ProvenanceClass
    trust: TrustLevel
    unverifiable: bool = False


def aggregate(tau_epi: float, tau_prov: ProvenanceClass, cfg: TrustConfig) -> TrustLevel:
    """High iff tau_epi >= theta AND tau_prov is in the high-provenance set.

    The threshold is inclusive: tau_epi == theta with good provenance is High.
    """
    if not 0.0 <= tau_epi <= 1.0:
        raise OutOfRange(f"tau_epi must be in [0, 1], got {tau_epi}")
    if tau_epi >= cfg.theta and tau_prov in cfg.high_prov_set:
        return TrustLevel.High
    return TrustLevel.Low


def ingress_provenance(channel: str, attestation: Attestation) -> ProvenanceClass:
    """Map a channel's attestation to a provenance class.

    Unsigned content is `unverified` no matter how trusted the channel name
    sounds; channels we cannot place at all are `unknown`.
    """
    return _ATTESTATION_TO_PROV[attestation]


_PLACEHOLDER_LABEL = BeliefLabel(
    src="unresolved", int_class=IntentClass.Unknown, age=0, path=("unresolved",)
)


def _entry_eval(entry, cfg: TrustConfig, known_ids: Set[str] | None) -> TrustEval:
    unverifiable = False
    if known_ids is not None and entry.belief_id not in known_ids:
        unverifiable = True
    if entry.label is None or entry.tau_epi is None or entry.tau_prov is None:
        unverifiable = True
    else:
        try:
            validate_label(entry.label)
        except InvalidBelief:
            unverifiable = True
        if not 0.0 <= entry.tau_epi <= 1.0:
            unverifiable = True

    if unverifiable:
        return TrustEval(
            belief_id=entry.belief_id,
            label=entry.label if entry.label is not None else _PLACEHOLDER_LABEL,
            tau_epi=entry.tau_epi if entry.tau_epi is not None else 0.0,
            tau_prov=entry.tau_prov if entry.tau_prov is not None else ProvenanceClass.unknown,
            trust=TrustLevel.Low,
            unverifiable=True,
        )
    return TrustEval(
        belief_id=entry.belief_id,
        label=entry.label,
        tau_epi=entry.tau_epi,
        tau_prov=entry.tau_prov,
        trust=aggregate(entry.tau_epi, entry.tau_prov, cfg),
    )


def evaluate_justification(
    just: Justification,
    cfg: TrustConfig,
    known_ids: Set[str] | None = None,
) -> tuple[TrustEval, ...]:
    """Evaluate every citation, treating unresolvable entries as Low.

    When `known_ids` is given, citations outside it are marked unverifiable
    instead of raising; this is the monitor's conservative default.
    """
    return tuple(_entry_eval(e, cfg, known_ids) for e in just.uses)


def justification_trust(
    just: Justification,
    cfg: TrustConfig,
    known_ids: Set[str] | None = None,
) -> TrustLevel:
    """Trust of a whole justification: the minimum over its citations.

    An empty justification is Low by default. With `known_ids` supplied, a
    citation of an unknown belief raises DanglingBeliefRef; callers that
    prefer the treat-as-Low default should use evaluate_justification.
    """
    if not just.uses:
        return TrustLevel.Low
    if known_ids is not None:
        for entry in just.uses:
            if entry.belief_id not in known_ids:
                raise DanglingBeliefRef(entry.belief_id)
    evals = evaluate_justification(just, cfg, known_ids)
    return min(e.trust for e in evals)


def weakest_provenance(classes: Iterable[ProvenanceClass]) -> ProvenanceClass:
    """The least assured class among `classes` (used for derived beliefs)."""
    return min(classes)
