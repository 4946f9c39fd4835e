"""The policy enforcement point: per-intent decisions.

Two policies live here. The belief-aware policy gates high-risk actions on
the trust of the beliefs cited by the intent's justification (rules R1-R3);
the belief-blind baseline is a static action whitelist that ignores
justifications entirely and exists to make the mismatch it allows executable
and testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Set

from .domain import Intent, RiskClass, TrustLevel
from .trust import TrustConfig, TrustEval, evaluate_justification


class Verdict(Enum):
    PERMIT = "PERMIT"
    DENY = "DENY"
    HITL = "HITL"


class Reason(Enum):
    """Stable reason codes; these exact strings go into the audit log."""

    R1_LOW_TRUST_HIGH_RISK = "R1_LOW_TRUST_HIGH_RISK"
    R2_MISSING_OR_UNVERIFIABLE_JUST = "R2_MISSING_OR_UNVERIFIABLE_JUST"
    R3_HIGH_HIGH_REQUIRES_HITL = "R3_HIGH_HIGH_REQUIRES_HITL"
    CONTAINED_LOW_RISK = "CONTAINED_LOW_RISK"
    BASELINE_SCOPE_ALLOW = "BASELINE_SCOPE_ALLOW"
    BASELINE_SCOPE_DENY = "BASELINE_SCOPE_DENY"


@dataclass(frozen=True)
class Decision:
    """A policy verdict with its machine-readable reason and the per-belief
    trust evaluations that justified it."""

    verdict: Verdict
    reason: Reason
    trust_evals: tuple[TrustEval, ...] = ()


@dataclass(frozen=True)
class ScopeSet:
    """Static whitelist of action names (the belief-blind baseline policy)."""

    allowed: frozenset[str]

    def __contains__(self, name: str) -> bool:
        return name in self.allowed


def decide_belief_aware(
    intent: Intent,
    risk: RiskClass,
    cfg: TrustConfig,
    known_ids: Set[str] | None = None,
) -> Decision:
    """Gate an intent on the trust of its cited beliefs.

    Rule order is fixed: R2 before R1, so an unusable justification is
    attributed precisely rather than folded into a generic low-trust denial.

      R2  high risk, justification missing or wholly unverifiable -> DENY
      R1  high risk, any cited belief evaluates Low               -> DENY
      R3  high risk, all citations High                           -> HITL
      containment: low risk                                       -> PERMIT
    """
    evals = evaluate_justification(intent.just, cfg, known_ids)

    if risk == RiskClass.High:
        if not evals or all(e.unverifiable for e in evals):
            return Decision(Verdict.DENY, Reason.R2_MISSING_OR_UNVERIFIABLE_JUST, evals)
        if any(e.trust == TrustLevel.Low for e in evals):
            return Decision(Verdict.DENY, Reason.R1_LOW_TRUST_HIGH_RISK, evals)
        return Decision(Verdict.HITL, Reason.R3_HIGH_HIGH_REQUIRES_HITL, evals)

    return Decision(Verdict.PERMIT, Reason.CONTAINED_LOW_RISK, evals)


def decide_belief_blind(intent: Intent, scope: ScopeSet) -> Decision:
    """Static-whitelist baseline: permit iff the action name is in scope.

    Ignores the justification entirely, which is exactly the gap the
    belief-aware policy closes.
    """
    if intent.action.name in scope:
        return Decision(Verdict.PERMIT, Reason.BASELINE_SCOPE_ALLOW)
    return Decision(Verdict.DENY, Reason.BASELINE_SCOPE_DENY)
