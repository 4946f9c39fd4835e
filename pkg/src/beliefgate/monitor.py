"""The instrumented run: event ordering over recv/plan/permit/exec/log.

A MonitorRun owns one agent run's state: the belief store populated at
ingress, the plan history with snapshotted justifications, and any pending
human decision. Every transition appends one audit record, so the emitted
log is sufficient on its own to re-check the safety property offline.

Ordering discipline: exec records only ever follow a PERMIT permit for the
same action, permits only follow a plan, and a plan may cite unknown belief
ids but gets flagged for it. Denials are logged as permit-event records with
decision=DENY so the event alphabet stays fixed while denials remain
auditable.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .audit import AuditRecord, HitlNote, LogSink, MemorySink
from .domain import (
    ActionSpec,
    Belief,
    BeliefLabel,
    Intent,
    IntentClass,
    Justification,
    JustificationEntry,
    RiskClass,
    RiskTable,
    classify_risk,
    validate_belief,
)
from .errors import AlreadyResolved, DanglingBeliefRef, NoPrecedingPlan, OutOfRange, UnknownToken
from .pep import Decision, Reason, ScopeSet, Verdict, decide_belief_aware, decide_belief_blind
from .trust import (
    Attestation,
    TrustConfig,
    TrustEval,
    aggregate,
    evaluate_justification,
    ingress_provenance,
    weakest_provenance,
)


class Mode(Enum):
    belief_aware = "belief_aware"
    belief_blind = "belief_blind"


class ExecStatus(Enum):
    Executed = "Executed"
    Denied = "Denied"
    PendingHITL = "PendingHITL"


class HitlVerdict(Enum):
    APPROVE = "APPROVE"
    DENY = "DENY"


@dataclass(frozen=True)
class ExecOutcome:
    """Result of an execution request. `token` is set only while a human
    decision is pending."""

    status: ExecStatus
    decision: Decision
    token: str | None = None


@dataclass(frozen=True)
class _Plan:
    seq: int
    intent: Intent  # justification snapshotted at plan time
    evals: tuple[TrustEval, ...]


@dataclass
class PendingExec:
    """A high-trust high-risk request parked until a human verdict arrives."""

    token: str
    run_id: str
    action: ActionSpec
    decision: Decision
    risk: RiskClass
    plan_seq: int
    created_ts: int
    resolved: bool = False


def system_clock() -> int:
    return int(time.time() * 1000)


def counter_clock(start: int = 0, step: int = 1) -> Callable[[], int]:
    """Deterministic millisecond clock for reproducible logs."""
    state = {"t": start - step}

    def tick() -> int:
        state["t"] += step
        return state["t"]

    return tick


class MonitorRun:
    """Single-writer state of one instrumented run.

    All events of a run are applied sequentially (a lock serializes callers,
    including out-of-band HITL resolution). Distinct runs may share a sink;
    the sink makes each append atomic.
    """

    def __init__(
        self,
        run_id: str,
        *,
        mode: Mode = Mode.belief_aware,
        cfg: TrustConfig | None = None,
        risk_table: RiskTable,
        scope: ScopeSet | None = None,
        sink: LogSink | None = None,
        clock: Callable[[], int] | None = None,
        hitl_listener: Callable[["MonitorRun", PendingExec], None] | None = None,
    ):
        self.run_id = run_id
        self.mode = mode
        self.cfg = cfg or TrustConfig()
        self.risk_table = risk_table
        self.scope = scope or ScopeSet(frozenset())
        self.sink = sink if sink is not None else MemorySink()
        self.hitl_listener = hitl_listener
        self._clock = clock or system_clock
        self._lock = threading.RLock()
        self._beliefs: dict[str, Belief] = {}
        self._plans: list[_Plan] = []
        self._pending: dict[str, PendingExec] = {}
        self._seq = 0
        self._belief_n = 0
        self._token_n = 0
        self._last_ts = -1

    # -- internals ----------------------------------------------------------

    def _now(self) -> int:
        ts = self._clock()
        if ts < self._last_ts:
            ts = self._last_ts
        self._last_ts = ts
        return ts

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _emit(self, event: str, **fields) -> AuditRecord:
        record = AuditRecord(
            ts=self._now(), seq=self._next_seq(), run_id=self.run_id, event=event, **fields
        )
        self.sink.append(record)
        return record

    def _belief_eval(self, belief: Belief) -> TrustEval:
        return TrustEval(
            belief_id=belief.id,
            label=belief.label,
            tau_epi=belief.tau_epi,
            tau_prov=belief.tau_prov,
            trust=aggregate(belief.tau_epi, belief.tau_prov, self.cfg),
        )

    # -- events --------------------------------------------------------------

    def recv(
        self,
        payload: str,
        channel: str,
        intent_class: IntentClass,
        attestation: Attestation,
        tau_epi: float,
    ) -> str:
        """Ingest external content as a new labelled belief.

        The label records the channel, the content class, arrival time, and a
        single-hop path; provenance comes from the channel's attestation.
        Returns the new belief id.
        """
        if not 0.0 <= tau_epi <= 1.0:
            raise OutOfRange(f"tau_epi must be in [0, 1], got {tau_epi}")
        with self._lock:
            now = self._now()
            self._belief_n += 1
            belief = validate_belief(
                Belief(
                    id=f"b{self._belief_n}",
                    proposition=payload,
                    label=BeliefLabel(
                        src=channel, int_class=intent_class, age=now, path=(channel,)
                    ),
                    tau_epi=tau_epi,
                    tau_prov=ingress_provenance(channel, attestation),
                )
            )
            self._beliefs[belief.id] = belief
            self._emit("recv", just_uses=(self._belief_eval(belief),))
            return belief.id

    def derive(self, parent_ids: list[str], proposition: str) -> str:
        """Combine existing beliefs into a new one under the weakest-link rule:
        the child inherits the minimum epistemic score and the least assured
        provenance of its parents, and its path concatenates theirs."""
        if not parent_ids:
            raise DanglingBeliefRef("<empty parent list>")
        with self._lock:
            parents = []
            for pid in parent_ids:
                if pid not in self._beliefs:
                    raise DanglingBeliefRef(pid)
                parents.append(self._beliefs[pid])
            now = self._now()
            self._belief_n += 1
            new_id = f"b{self._belief_n}"
            int_classes = {p.label.int_class for p in parents}
            path: tuple[str, ...] = ()
            for p in parents:
                path += p.label.path
            belief = validate_belief(
                Belief(
                    id=new_id,
                    proposition=proposition,
                    label=BeliefLabel(
                        src=f"derived({','.join(parent_ids)})",
                        int_class=int_classes.pop() if len(int_classes) == 1 else IntentClass.Mixed,
                        age=now,
                        path=path + (f"derived:{new_id}",),
                    ),
                    tau_epi=min(p.tau_epi for p in parents),
                    tau_prov=weakest_provenance(p.tau_prov for p in parents),
                )
            )
            self._beliefs[belief.id] = belief
            self._emit("recv", just_uses=(self._belief_eval(belief),), derived=True)
            return belief.id

    def plan(self, intent: Intent) -> int:
        """Record an externalized intention.

        Label data for every cited belief is snapshotted now, so the log stays
        self-contained for offline slicing. Empty or dangling citations are
        accepted and flagged (O2_EMPTY / DANGLING_REF:<id>); policy downgrades
        them to Low trust instead of rejecting the plan. Returns the plan's
        record seq.
        """
        with self._lock:
            snapshots = []
            flags = []
            if not intent.just.uses:
                flags.append("O2_EMPTY")
            for entry in intent.just.uses:
                belief = self._beliefs.get(entry.belief_id)
                if belief is None:
                    flags.append(f"DANGLING_REF:{entry.belief_id}")
                    snapshots.append(entry)
                else:
                    snapshots.append(
                        JustificationEntry(
                            belief_id=belief.id,
                            label=belief.label,
                            tau_epi=belief.tau_epi,
                            tau_prov=belief.tau_prov,
                        )
                    )
            effective = replace(intent, just=Justification(tuple(snapshots)))
            evals = evaluate_justification(
                effective.just, self.cfg, known_ids=self._beliefs.keys()
            )
            record = self._emit(
                "plan",
                alpha=intent.action,
                just_uses=evals,
                reason=";".join(flags) if flags else None,
            )
            self._plans.append(_Plan(seq=record.seq, intent=effective, evals=evals))
            return record.seq

    def _closest_plan(self, action_name: str) -> _Plan | None:
        for plan in reversed(self._plans):
            if plan.intent.action.name == action_name:
                return plan
        return None

    def request_exec(self, action: ActionSpec) -> ExecOutcome:
        """Gate an execution request through the run's policy.

        The request is matched to the closest preceding plan by action name;
        requesting an action that was never planned is an error, not a denial.
        PERMIT appends permit+exec records; DENY appends the permit record with
        the denial; HITL parks the request behind a token with no records yet.
        """
        with self._lock:
            plan = self._closest_plan(action.name)
            if plan is None:
                raise NoPrecedingPlan(f"no plan precedes exec of {action.name!r}")
            risk = classify_risk(action, self.risk_table)
            if self.mode == Mode.belief_aware:
                decision = decide_belief_aware(
                    plan.intent, risk, self.cfg, known_ids=self._beliefs.keys()
                )
            else:
                decision = decide_belief_blind(plan.intent, self.scope)

            if decision.verdict == Verdict.PERMIT:
                self._emit(
                    "permit",
                    alpha=action,
                    just_uses=decision.trust_evals,
                    decision=Verdict.PERMIT,
                    reason=decision.reason.value,
                )
                self._emit("exec", alpha=action)
                return ExecOutcome(ExecStatus.Executed, decision)

            if decision.verdict == Verdict.DENY:
                self._emit(
                    "permit",
                    alpha=action,
                    just_uses=decision.trust_evals,
                    decision=Verdict.DENY,
                    reason=decision.reason.value,
                )
                return ExecOutcome(ExecStatus.Denied, decision)

            self._token_n += 1
            pending = PendingExec(
                token=f"{self.run_id}:h{self._token_n}",
                run_id=self.run_id,
                action=action,
                decision=decision,
                risk=risk,
                plan_seq=plan.seq,
                created_ts=self._now(),
            )
            self._pending[pending.token] = pending
            if self.hitl_listener is not None:
                self.hitl_listener(self, pending)
            return ExecOutcome(ExecStatus.PendingHITL, decision, token=pending.token)

    def resolve_hitl(self, token: str, verdict: HitlVerdict | str, approver: str) -> ExecOutcome:
        """Apply a human verdict to a pending request, exactly once.

        APPROVE appends the permit (annotated with the approver) and the exec
        record; DENY appends the annotated denial. A second resolution of the
        same token fails.
        """
        verdict = HitlVerdict(verdict) if isinstance(verdict, str) else verdict
        with self._lock:
            pending = self._pending.get(token)
            if pending is None:
                raise UnknownToken(f"no pending decision for token {token!r}")
            if pending.resolved:
                raise AlreadyResolved(f"token {token!r} was already resolved")
            pending.resolved = True
            note = HitlNote(approver=approver, verdict=verdict.value)
            if verdict == HitlVerdict.APPROVE:
                self._emit(
                    "permit",
                    alpha=pending.action,
                    just_uses=pending.decision.trust_evals,
                    decision=Verdict.PERMIT,
                    reason=pending.decision.reason.value,
                    hitl=note,
                )
                self._emit("exec", alpha=pending.action)
                return ExecOutcome(
                    ExecStatus.Executed,
                    Decision(Verdict.PERMIT, pending.decision.reason, pending.decision.trust_evals),
                    token=token,
                )
            self._emit(
                "permit",
                alpha=pending.action,
                just_uses=pending.decision.trust_evals,
                decision=Verdict.DENY,
                reason=pending.decision.reason.value,
                hitl=note,
            )
            return ExecOutcome(
                ExecStatus.Denied,
                Decision(Verdict.DENY, pending.decision.reason, pending.decision.trust_evals),
                token=token,
            )

    def annotate(self, text: str) -> None:
        """Append a free-form log-event record (no policy effect)."""
        with self._lock:
            self._emit("log", reason=text)

    # -- introspection --------------------------------------------------------

    @property
    def beliefs(self) -> dict[str, Belief]:
        return dict(self._beliefs)

    def pending_tokens(self) -> list[str]:
        return [t for t, p in self._pending.items() if not p.resolved]

    def fork(self) -> "MonitorRun":
        """Cheap copy for in-memory search over runs (requires a MemorySink).

        The clone shares immutable config and copies mutable state; its log
        diverges independently from the fork point.
        """
        if not isinstance(self.sink, MemorySink):
            raise ValueError("fork requires a MemorySink")
        clone = MonitorRun.__new__(MonitorRun)
        clone.run_id = self.run_id
        clone.mode = self.mode
        clone.cfg = self.cfg
        clone.risk_table = self.risk_table
        clone.scope = self.scope
        clone.sink = MemorySink._resume(list(self.sink.records), dict(self.sink._last_seq))
        clone.hitl_listener = None
        # continuation clock: timestamps depend only on the path, not siblings
        clone._clock = counter_clock(start=self._last_ts + 1)
        clone._lock = threading.RLock()
        clone._beliefs = dict(self._beliefs)
        clone._plans = list(self._plans)
        clone._pending = {t: replace(p) for t, p in self._pending.items()}
        clone._seq = self._seq
        clone._belief_n = self._belief_n
        clone._token_n = self._token_n
        clone._last_ts = self._last_ts
        return clone
