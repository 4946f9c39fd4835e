"""The human-in-the-loop gateway core.

High-trust high-risk requests park here until a human approves or denies
them. The gateway is fail-safe: an entry that reaches its deadline without a
verdict is auto-denied (approver "timeout"), because admitting on silence
would reopen exactly the hole the policy closes. Resolution is exactly-once;
the race between a human verdict and the timeout sweep is settled by
whichever commits first under the lock.

Transport lives elsewhere (see service); this module is plain objects so the
same semantics back both the HTTP surface and in-process tests.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Callable, Mapping

from .domain import RiskClass
from .errors import AlreadyResolved, DuplicateToken, Expired, UnknownToken
from .monitor import ExecOutcome, MonitorRun, PendingExec
from .trust import TrustEval

DEFAULT_TIMEOUT_MS = 30_000


@dataclass(frozen=True)
class PendingDecision:
    """A pending request as shown to approvers: the intent summary, the trust
    evaluations behind it, and the deadline after which it auto-denies."""

    token: str
    run_id: str
    created_ts: int
    action_name: str
    args: Mapping[str, str]
    target: str
    trust_evals: tuple[TrustEval, ...]
    risk: RiskClass
    deadline_ts: int


class HitlGateway:
    """Shared pending-decision set for any number of runs.

    Wire a run to the gateway by passing `gateway.submit_pending` as the run's
    hitl_listener (or use `attach`). Mutations are serialized; list_pending
    returns a consistent snapshot ordered by creation time.
    """

    def __init__(self, timeout_ms: int = DEFAULT_TIMEOUT_MS, clock: Callable[[], int] | None = None):
        self.timeout_ms = timeout_ms
        self._clock = clock or (lambda: int(time.time() * 1000))
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}

    def attach(self, run: MonitorRun) -> MonitorRun:
        run.hitl_listener = self.submit_pending
        return run

    def submit_pending(self, run: MonitorRun, pending: PendingExec) -> str:
        """Queue a run's pending exec; returns its token. Shape-compatible
        with MonitorRun.hitl_listener."""
        now = self._clock()
        decision = PendingDecision(
            token=pending.token,
            run_id=pending.run_id,
            created_ts=pending.created_ts,
            action_name=pending.action.name,
            args=dict(pending.action.args),
            target=pending.action.target,
            trust_evals=pending.decision.trust_evals,
            risk=pending.risk,
            deadline_ts=now + self.timeout_ms,
        )
        with self._lock:
            if pending.token in self._entries:
                raise DuplicateToken(f"token {pending.token!r} already queued")
            self._entries[pending.token] = _Entry(decision=decision, run=run)
        return pending.token

    def list_pending(self) -> list[PendingDecision]:
        """Snapshot of unresolved, unexpired entries, oldest first."""
        self.sweep_expired()
        with self._lock:
            live = [e.decision for e in self._entries.values() if e.status == "pending"]
        return sorted(live, key=lambda d: (d.created_ts, d.token))

    def resolve(self, token: str, verdict: str, approver: str) -> ExecOutcome:
        """Apply a human verdict, forwarding to the owning run.

        Raises UnknownToken / AlreadyResolved / Expired; at most one verdict
        ever takes effect per token.
        """
        self.sweep_expired()
        with self._lock:
            entry = self._entries.get(token)
            if entry is None:
                raise UnknownToken(f"no pending decision for token {token!r}")
            if entry.status == "expired":
                raise Expired(f"token {token!r} timed out and was auto-denied")
            if entry.status == "resolved":
                raise AlreadyResolved(f"token {token!r} was already resolved")
            entry.status = "resolved"
            run = entry.run
        # the run serializes its own event application
        return run.resolve_hitl(token, verdict, approver)

    def sweep_expired(self, now: int | None = None) -> list[str]:
        """Auto-deny every pending entry past its deadline; returns the swept
        tokens. Safe to call from a background loop or lazily on access."""
        now = self._clock() if now is None else now
        swept: list[tuple[str, MonitorRun]] = []
        with self._lock:
            for token, entry in self._entries.items():
                if entry.status == "pending" and now >= entry.decision.deadline_ts:
                    entry.status = "expired"
                    swept.append((token, entry.run))
        for token, run in swept:
            run.resolve_hitl(token, "DENY", "timeout")
        return [t for t, _ in swept]

    def status(self, token: str) -> str | None:
        with self._lock:
            entry = self._entries.get(token)
            return entry.status if entry else None


@dataclass
class _Entry:
    decision: PendingDecision
    run: MonitorRun
    status: str = "pending"  # pending | resolved | expired
