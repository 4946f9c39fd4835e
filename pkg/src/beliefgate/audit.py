"""Audit log: the minimal record schema, the append-only jsonl wire format,
backward slicing from an exec to the beliefs that justified it, and the
offline trace-safety checker.

Wire format: one JSON object per line, UTF-8, top-level keys exactly
"ts","seq","run_id","event","alpha","just.uses","decision","reason","hitl",
"derived" in that order. Absent optional fields are omitted, never null. The
dotted key "just.uses" is deliberate. `seq` is a per-run tiebreaker beyond
the timestamp: equal timestamps would make "closest preceding" ambiguous.

The checker and slicer work from log content alone; they never touch monitor
state, so they can run in a separate process over the file.
"""

from __future__ import annotations

import io
import json
import os
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Iterator, Mapping

from .domain import (
    ActionSpec,
    BeliefLabel,
    IntentClass,
    ProvenanceClass,
    RiskClass,
    RiskTable,
    TrustLevel,
    classify_risk,
)
from .errors import InvariantViolation, MissingPlan, NotAnExec, ParseError, SerializationError
from .pep import Verdict
from .trust import TrustEval

EVENTS = ("recv", "plan", "permit", "exec", "log")


@dataclass(frozen=True)
class HitlNote:
    """Human-resolution annotation on a permit record."""

    approver: str
    verdict: str  # APPROVE | DENY


@dataclass(frozen=True)
class AuditRecord:
    """One log line. Field presence depends on the event kind:

    - plan records always carry just_uses (an empty list is meaningful);
    - permit records always carry a decision;
    - recv records carry the new belief's evaluation in just_uses, with
      derived=True when the belief was combined from parents.
    """

    ts: int
    seq: int
    run_id: str
    event: str
    alpha: ActionSpec | None = None
    just_uses: tuple[TrustEval, ...] | None = None
    decision: Verdict | None = None
    reason: str | None = None
    hitl: HitlNote | None = None
    derived: bool | None = None


def validate_record(record: AuditRecord) -> AuditRecord:
    """Record-local schema checks; raises InvariantViolation."""
    if record.event not in EVENTS:
        raise InvariantViolation(f"unknown event kind: {record.event!r}")
    if record.event == "plan" and record.just_uses is None:
        raise InvariantViolation("plan record must carry just.uses (may be empty)")
    if record.event == "permit" and record.decision is None:
        raise InvariantViolation("permit record must carry a decision")
    if record.seq < 1:
        raise InvariantViolation(f"seq must be >= 1, got {record.seq}")
    return record


# --- wire encoding ---------------------------------------------------------


def _label_to_obj(label: BeliefLabel) -> dict:
    return {
        "src": label.src,
        "int": label.int_class.value,
        "age": label.age,
        "path": list(label.path),
    }


def _label_from_obj(obj: Mapping) -> BeliefLabel:
    return BeliefLabel(
        src=obj["src"],
        int_class=IntentClass(obj["int"]),
        age=obj["age"],
        path=tuple(obj["path"]),
    )


def _eval_to_obj(te: TrustEval) -> dict:
    obj = {
        "belief_id": te.belief_id,
        "lambda": _label_to_obj(te.label),
        "tau_epi": te.tau_epi,
        "tau_prov": te.tau_prov.name,
        "trust": te.trust.name,
    }
    if te.unverifiable:
        obj["unverifiable"] = True
    return obj


def _eval_from_obj(obj: Mapping) -> TrustEval:
    return TrustEval(
        belief_id=obj["belief_id"],
        label=_label_from_obj(obj["lambda"]),
        tau_epi=obj["tau_epi"],
        tau_prov=ProvenanceClass.parse(obj["tau_prov"]),
        trust=TrustLevel[obj["trust"]],
        unverifiable=obj.get("unverifiable", False),
    )


def _alpha_to_obj(alpha: ActionSpec) -> dict:
    return {"name": alpha.name, "args": dict(alpha.args), "target": alpha.target}


def _alpha_from_obj(obj: Mapping) -> ActionSpec:
    return ActionSpec(name=obj["name"], args=dict(obj["args"]), target=obj["target"])


def record_to_line(record: AuditRecord) -> str:
    """Serialize one record to its canonical single-line JSON form."""
    obj: dict = {
        "ts": record.ts,
        "seq": record.seq,
        "run_id": record.run_id,
        "event": record.event,
    }
    if record.alpha is not None:
        obj["alpha"] = _alpha_to_obj(record.alpha)
    if record.just_uses is not None:
        obj["just.uses"] = [_eval_to_obj(te) for te in record.just_uses]
    if record.decision is not None:
        obj["decision"] = record.decision.value
    if record.reason is not None:
        obj["reason"] = record.reason
    if record.hitl is not None:
        obj["hitl"] = {"approver": record.hitl.approver, "verdict": record.hitl.verdict}
    if record.derived is not None:
        obj["derived"] = record.derived
    try:
        return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)
    except (TypeError, ValueError) as exc:
        raise SerializationError(str(exc)) from exc


def record_from_obj(obj: Mapping) -> AuditRecord:
    record = AuditRecord(
        ts=obj["ts"],
        seq=obj["seq"],
        run_id=obj["run_id"],
        event=obj["event"],
        alpha=_alpha_from_obj(obj["alpha"]) if "alpha" in obj else None,
        just_uses=tuple(_eval_from_obj(e) for e in obj["just.uses"])
        if "just.uses" in obj
        else None,
        decision=Verdict(obj["decision"]) if "decision" in obj else None,
        reason=obj.get("reason"),
        hitl=HitlNote(obj["hitl"]["approver"], obj["hitl"]["verdict"])
        if "hitl" in obj
        else None,
        derived=obj.get("derived"),
    )
    return validate_record(record)


# --- sinks -----------------------------------------------------------------


class LogSink:
    """Append-only record sink. Appends are atomic per record and validate
    schema invariants plus per-run seq monotonicity; earlier lines are never
    rewritten."""

    def __init__(self):
        self._lock = threading.Lock()
        self._last_seq: dict[str, int] = {}

    def append(self, record: AuditRecord) -> None:
        validate_record(record)
        with self._lock:
            last = self._last_seq.get(record.run_id)
            if last is not None and record.seq <= last:
                raise InvariantViolation(
                    f"seq must increase per run: {record.seq} after {last}"
                )
            self._write(record)
            self._last_seq[record.run_id] = record.seq

    def _write(self, record: AuditRecord) -> None:
        raise NotImplementedError


class MemorySink(LogSink):
    """In-memory sink used by tests and the trace enumerator. Serialization
    is deferred to lines(), so search workloads don't pay for it."""

    def __init__(self, records: Iterable[AuditRecord] = ()):
        super().__init__()
        self.records: list[AuditRecord] = list(records)
        for r in self.records:
            last = self._last_seq.get(r.run_id)
            if last is None or r.seq > last:
                self._last_seq[r.run_id] = r.seq

    @classmethod
    def _resume(cls, records: list[AuditRecord], last_seq: dict[str, int]) -> "MemorySink":
        # fast path for fork(): trust the caller's seq state
        sink = cls.__new__(cls)
        sink._lock = threading.Lock()
        sink._last_seq = last_seq
        sink.records = records
        return sink

    def _write(self, record: AuditRecord) -> None:
        self.records.append(record)

    def lines(self) -> list[str]:
        return [record_to_line(r) for r in self.records]


class FileSink(LogSink):
    """Sink writing one line per record to a .jsonl file, flushed per append."""

    def __init__(self, path: str | os.PathLike):
        super().__init__()
        self.path = os.fspath(path)
        parent = os.path.dirname(self.path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        self._fh: IO[str] = open(self.path, "a", encoding="utf-8")

    def _write(self, record: AuditRecord) -> None:
        self._fh.write(record_to_line(record) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "FileSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def append(sink: LogSink, record: AuditRecord) -> None:
    sink.append(record)


# --- reading ---------------------------------------------------------------


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        yield from source
    else:
        yield from source


def read_log(source) -> list[AuditRecord]:
    """Parse a jsonl log from a path, an open stream, or an iterable of lines.

    Round-trips with the writer field-exactly. Malformed lines abort with a
    ParseError carrying the 1-based line number.
    """
    records = []
    for line_no, line in enumerate(_iter_lines(source), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            obj = json.loads(stripped)
            records.append(record_from_obj(obj))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError, InvariantViolation) as exc:
            raise ParseError(line_no, str(exc)) from exc
    return records


# --- slicing and checking --------------------------------------------------


def _closest_preceding_plan(
    records: list[AuditRecord], before_index: int, action_name: str, run_id: str
) -> AuditRecord | None:
    for r in reversed(records[:before_index]):
        if (
            r.run_id == run_id
            and r.event == "plan"
            and r.alpha is not None
            and r.alpha.name == action_name
        ):
            return r
    return None


def backward_slice(
    records: list[AuditRecord], exec_seq: int, run_id: str | None = None
) -> tuple[TrustEval, ...]:
    """Reconstruct, from log content alone, the belief citations behind an exec.

    `exec_seq` is the record's per-run seq number; pass `run_id` to
    disambiguate logs that interleave several runs. Returns the closest
    preceding matching plan's citations in citation order.
    """
    matches = [
        (i, r)
        for i, r in enumerate(records)
        if r.seq == exec_seq and (run_id is None or r.run_id == run_id)
    ]
    if not matches:
        raise NotAnExec(f"no record with seq {exec_seq}")
    if len(matches) > 1:
        raise NotAnExec(f"seq {exec_seq} is ambiguous across runs; pass run_id")
    index, record = matches[0]
    if record.event != "exec":
        raise NotAnExec(f"record seq {exec_seq} is a {record.event!r} record")
    plan = _closest_preceding_plan(records, index, record.alpha.name, record.run_id)
    if plan is None:
        raise MissingPlan(f"exec seq {exec_seq} has no preceding plan for {record.alpha.name!r}")
    return plan.just_uses or ()


class ViolationKind(Enum):
    LOW_TRUST_CITATION = "LOW_TRUST_CITATION"
    MISSING_PLAN = "MISSING_PLAN"
    MISSING_PERMIT = "MISSING_PERMIT"


@dataclass(frozen=True)
class Violation:
    exec_seq: int
    run_id: str
    belief_ids: tuple[str, ...]
    kind: ViolationKind

    def to_obj(self) -> dict:
        return {
            "exec_seq": self.exec_seq,
            "run_id": self.run_id,
            "kind": self.kind.value,
            "belief_ids": list(self.belief_ids),
        }


def check_trace_safety(records: list[AuditRecord], risk_table: RiskTable) -> list[Violation]:
    """Check the trace safety property over a log.

    Flags every high-risk exec whose closest preceding plan cites a Low-trust
    belief, plus the ordering breaches that would hide one: an exec with no
    plan at all, or with no prior PERMIT for its action. An empty result
    means the log satisfies the safety property.
    """
    violations: list[Violation] = []
    for index, record in enumerate(records):
        if record.event != "exec":
            continue
        if classify_risk(record.alpha, risk_table) != RiskClass.High:
            continue
        plan = _closest_preceding_plan(records, index, record.alpha.name, record.run_id)
        if plan is None:
            violations.append(
                Violation(record.seq, record.run_id, (), ViolationKind.MISSING_PLAN)
            )
            continue
        low_ids = tuple(
            te.belief_id for te in (plan.just_uses or ()) if te.trust == TrustLevel.Low
        )
        if low_ids:
            violations.append(
                Violation(record.seq, record.run_id, low_ids, ViolationKind.LOW_TRUST_CITATION)
            )
            continue
        permitted = any(
            r.run_id == record.run_id
            and r.event == "permit"
            and r.decision == Verdict.PERMIT
            and r.alpha is not None
            and r.alpha.name == record.alpha.name
            for r in records[:index]
        )
        if not permitted:
            violations.append(
                Violation(record.seq, record.run_id, (), ViolationKind.MISSING_PERMIT)
            )
    return violations
