"""Acceptance gate: one test per top-level criterion, each printing a
PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s`).

Tolerances and bounds are pinned here, not configurable:
  - incident demo runtime < 1 s, enumeration sweep < 10 s
  - monotonicity grid: 21 tau points x 4 provenance classes x theta in
    {0.1, 0.5, 0.9}, zero counterexamples
  - decision safety: 10_000 randomized intents, zero escapes
  - checker equivalence: 1000 random logs + 100 mutants, zero disagreement
"""

import json
import random
import subprocess
import sys
import time

import pytest

from beliefgate.audit import check_trace_safety, read_log, record_to_line
from beliefgate.domain import ProvenanceClass, RiskClass, TrustLevel
from beliefgate.monitor import Mode
from beliefgate.pep import Reason, Verdict, decide_belief_aware
from beliefgate.simlab import (
    EnumerationParams,
    demo_mcp_github,
    enumerate_traces,
    matches_escalation_chain,
    random_traces,
)
from beliefgate.trust import TrustConfig, aggregate

from .conftest import make_entry, make_intent
from .test_audit import (
    GEN_TABLE,
    checker_flagged,
    flip_one_trust_field,
    oracle_flagged,
)


def report(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}")


def test_c1_mcp_case_study_golden(data_dir):
    """Incident demo matches the stage-by-stage table in both modes, < 1 s."""
    start = time.monotonic()
    before = demo_mcp_github("before")
    after = demo_mcp_github("after")
    elapsed = time.monotonic() - start

    assert [r.outcome for r in before.rows] == ["✓", "✓", "ALLOW", "Leak"]
    assert before.transcript.outcomes == ["ok", "ok", "Executed"]

    after_outcomes = [r.outcome for r in after.rows]
    assert after_outcomes[:2] == ["✓", "✓"]
    assert after_outcomes[2] == "DENY (R1_LOW_TRUST_HIGH_RISK)"
    assert after_outcomes[3] == "Unreachable"
    assert not any(r.event == "exec" for r in after.transcript.records)
    assert elapsed < 1.0, f"demo took {elapsed:.3f}s"

    # the CLI surface produces the same table
    proc = subprocess.run(
        [sys.executable, "-m", "beliefgate.cli", "demo", "mcp-github", "--mode", "after"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "DENY (R1_LOW_TRUST_HIGH_RISK)" in proc.stdout
    assert "Unreachable" in proc.stdout
    report("C1 incident case study golden (before/after, < 1 s)")


def test_c2_enumeration_certificate():
    """All parameterizations up to 2 beliefs x 2 actions at max_len 6: zero
    violations in aware mode over >= 10^4 traces; the blind baseline yields a
    4-event witness in stage order; all in under 10 s."""
    H, L = TrustLevel.High, TrustLevel.Low
    HR, LR = RiskClass.High, RiskClass.Low
    profiles = [(H,), (L,), (H, H), (H, L), (L, L)]
    risk_sets = [(HR,), (LR,), (HR, HR), (HR, LR), (LR, LR)]

    start = time.monotonic()
    total = 0
    for profile in profiles:
        for risks in risk_sets:
            rep = enumerate_traces(
                EnumerationParams(
                    max_len=6, trust_profile=profile, action_risks=risks,
                    mode=Mode.belief_aware,
                )
            )
            assert rep.violating == 0, f"violations under profile={profile} risks={risks}"
            total += rep.total

    blind = enumerate_traces(
        EnumerationParams(
            max_len=6, trust_profile=(L,), action_risks=(HR,), mode=Mode.belief_blind,
        )
    )
    elapsed = time.monotonic() - start

    assert total >= 10_000, f"only {total} traces enumerated"
    assert blind.violating >= 1
    assert blind.witness.log_events == ("recv", "plan", "permit", "exec")
    assert matches_escalation_chain(read_log(blind.witness.log_lines))
    assert elapsed < 10.0, f"enumeration took {elapsed:.2f}s"
    report(f"C2 enumeration certificate ({total} aware traces, blind witness, {elapsed:.1f}s)")


def test_c3_monotonicity_suite():
    grid = [i / 20 for i in range(21)]
    provs = list(ProvenanceClass)
    counterexamples = []
    for theta in (0.1, 0.5, 0.9):
        cfg = TrustConfig(theta=theta)
        values = {(t, p): aggregate(t, p, cfg) for t in grid for p in provs}
        for t1 in grid:
            for t2 in grid:
                if t1 > t2:
                    continue
                for p1 in provs:
                    for p2 in provs:
                        if p1 > p2:
                            continue
                        if values[(t1, p1)] > values[(t2, p2)]:
                            counterexamples.append((theta, t1, p1.name, t2, p2.name))
    assert counterexamples == []
    report("C3 monotonicity suite (21-point grid x 4 classes x 3 thetas)")


def test_c4_decision_level_safety():
    rng = random.Random(0xBEEF)
    cfg = TrustConfig()
    low_high_cases = 0
    for _ in range(10_000):
        entries = [
            make_entry(
                f"b{i}",
                tau_epi=rng.choice([0.0, 0.3, 0.5, 0.7, 1.0]),
                tau_prov=rng.choice(list(ProvenanceClass)),
            )
            for i in range(rng.randint(0, 3))
        ]
        risk = rng.choice([RiskClass.Low, RiskClass.High])
        d = decide_belief_aware(make_intent(entries=entries), risk, cfg)
        if risk == RiskClass.High:
            assert d.verdict != Verdict.PERMIT, "high risk must never permit directly"
            low = not entries or any(e.trust == TrustLevel.Low for e in d.trust_evals)
            if low:
                low_high_cases += 1
                assert d.verdict == Verdict.DENY
                assert d.verdict != Verdict.HITL
    assert low_high_cases >= 1_000
    report(f"C4 decision-level safety (10000 intents, {low_high_cases} low/high cases)")


def test_c5_checker_oracle_equivalence():
    corpora = []
    for mode in (Mode.belief_blind, Mode.belief_aware):
        for profile in ((TrustLevel.Low, TrustLevel.High), (TrustLevel.High, TrustLevel.High)):
            corpora += random_traces(
                seed=23,
                n=250,
                p=EnumerationParams(
                    max_len=6, trust_profile=profile,
                    action_risks=(RiskClass.High, RiskClass.Low), mode=mode,
                ),
            )
    assert len(corpora) == 1000

    rng = random.Random(0xD1CE)
    mutated = []
    base = random_traces(
        seed=29,
        n=4000,
        p=EnumerationParams(
            max_len=6, trust_profile=(TrustLevel.High, TrustLevel.High),
            action_risks=(RiskClass.High, RiskClass.Low), mode=Mode.belief_blind,
        ),
    )
    for lines in base:
        hit = flip_one_trust_field(lines, rng)
        if hit is not None:
            mutated.append(hit)
        if len(mutated) == 100:
            break
    assert len(mutated) == 100

    disagreements = 0
    for lines in corpora:
        records = read_log(lines)
        if checker_flagged(records, GEN_TABLE) != oracle_flagged(records, GEN_TABLE):
            disagreements += 1
    for lines, exec_seq in mutated:
        records = read_log(lines)
        flagged = checker_flagged(records, GEN_TABLE)
        if flagged != oracle_flagged(records, GEN_TABLE):
            disagreements += 1
        assert any(seq == exec_seq for _, seq in flagged), "mutant escaped the checker"
    assert disagreements == 0
    report("C5 checker/oracle equivalence (1000 logs + 100 mutants, 0 disagreements)")


def test_c6_log_round_trip_and_slice_sufficiency(data_dir, tmp_path):
    # field-exact round trip on both goldens
    for name in ("mcp_before.jsonl", "mcp_after.jsonl"):
        original = (data_dir / name).read_text().splitlines()
        assert [record_to_line(r) for r in read_log(data_dir / name)] == original

    # separate-process checker over a file reproduces in-process results
    combined = tmp_path / "combined.jsonl"
    combined.write_text(
        (data_dir / "mcp_before.jsonl").read_text() + (data_dir / "mcp_after.jsonl").read_text()
    )
    records = read_log(combined)
    from beliefgate.domain import RiskTable

    table = RiskTable(rules=(("post_comment", RiskClass.High),))
    in_process = {(v.run_id, v.exec_seq, v.kind.value) for v in check_trace_safety(records, table)}

    proc = subprocess.run(
        [sys.executable, "-m", "beliefgate.cli", "check", "--log", str(combined)],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 2
    out_of_process = {
        (obj["run_id"], obj["exec_seq"], obj["kind"])
        for obj in (json.loads(line) for line in proc.stdout.splitlines())
    }
    assert out_of_process == in_process == {("mcp_github-belief_blind", 4, "LOW_TRUST_CITATION")}
    report("C6 log round-trip field-exact; separate-process checker agrees")


def test_c7_hitl_fail_safe(tmp_path):
    from fastapi.testclient import TestClient

    from beliefgate.service import create_app
    from .test_service import HITL_SCENARIO, log_events

    app = create_app(timeout_ms=250, log_dir=str(tmp_path), sweep_interval_s=0.05)
    with TestClient(app) as client:
        resp = client.post("/runs", json={"scenario": HITL_SCENARIO})
        run_id = resp.json()["run_id"]
        token = resp.json()["pending"][0]
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline and client.get("/pending").json():
            time.sleep(0.05)
        assert client.get("/pending").json() == [], "pending entry did not expire"
        assert client.post(
            f"/decisions/{token}", json={"verdict": "APPROVE", "approver": "late"}
        ).status_code == 410
        events = log_events(client, run_id)
        assert events == ["recv", "plan", "permit"], "timeout must deny, not execute"
        lines = client.get(f"/runs/{run_id}/log").text.splitlines()
        last = json.loads(lines[-1])
        assert last["decision"] == "DENY" and last["hitl"]["approver"] == "timeout"

    # enumeration with timeout branches stays violation-free
    rep = enumerate_traces(
        EnumerationParams(
            max_len=5, trust_profile=(TrustLevel.High,), action_risks=(RiskClass.High,),
            mode=Mode.belief_aware, include_timeout_branch=True,
        )
    )
    assert rep.violating == 0
    report("C7 HITL fail-safe (timeout denies; timeout branches violation-free)")
