import json
import time

import pytest

from beliefgate.audit import read_log, record_to_line
from beliefgate.domain import RiskClass, TrustLevel
from beliefgate.errors import BudgetExceeded, ScenarioError
from beliefgate.monitor import Mode
from beliefgate.pep import Verdict
from beliefgate.simlab import (
    EnumerationParams,
    demo_mcp_github,
    enumerate_traces,
    load_scenario,
    load_scenario_file,
    matches_escalation_chain,
    mcp_github_scenario,
    random_traces,
    run_scenario,
)


class TestIncidentScenario:
    def test_blind_mode_reproduces_the_leak(self):
        t = run_scenario(mcp_github_scenario(Mode.belief_blind))
        assert t.outcomes == ["ok", "ok", "Executed"]
        assert t.failures == []

    def test_aware_mode_denies_at_the_gate(self):
        t = run_scenario(mcp_github_scenario(Mode.belief_aware))
        assert t.outcomes == ["ok", "ok", "Denied(R1_LOW_TRUST_HIGH_RISK)"]
        assert t.failures == []
        assert not any(r.event == "exec" for r in t.records)

    @pytest.mark.parametrize(
        "mode,golden",
        [(Mode.belief_blind, "mcp_before.jsonl"), (Mode.belief_aware, "mcp_after.jsonl")],
    )
    def test_emitted_log_matches_golden_byte_for_byte(self, mode, golden, data_dir):
        t = run_scenario(mcp_github_scenario(mode))
        produced = [record_to_line(r) for r in t.records]
        assert produced == (data_dir / golden).read_text().splitlines()

    def test_repeated_runs_are_identical(self):
        a = run_scenario(mcp_github_scenario(Mode.belief_aware))
        b = run_scenario(mcp_github_scenario(Mode.belief_aware))
        assert [record_to_line(r) for r in a.records] == [record_to_line(r) for r in b.records]

    def test_mode_override_flips_the_outcome(self):
        t = run_scenario(mcp_github_scenario(Mode.belief_blind), mode=Mode.belief_aware)
        assert t.outcomes[-1] == "Denied(R1_LOW_TRUST_HIGH_RISK)"

    def test_theta_override_is_applied(self):
        # even theta ~ 0 cannot rescue unverified provenance; still denied
        t = run_scenario(mcp_github_scenario(Mode.belief_aware), theta=0.01)
        assert t.outcomes[-1] == "Denied(R1_LOW_TRUST_HIGH_RISK)"


class TestScenarioDocuments:
    DOC = {
        "name": "demo",
        "mode": "belief_aware",
        "theta": 0.5,
        "risk_table": {"rules": [["send_*", "High"]], "default": "Low"},
        "scope": ["send_mail"],
        "steps": [
            {
                "op": "recv", "belief": "note", "payload": "hello",
                "channel": "inbox", "intent_class": "Factual",
                "attestation": "signed_attested", "tau_epi": 0.9,
            },
            {"op": "plan", "action": {"name": "send_mail"}, "uses": ["note"]},
            {"op": "request_exec", "action": "send_mail"},
            {"op": "resolve_hitl", "verdict": "APPROVE", "approver": "op"},
        ],
        "expected": ["ok", "ok", "PendingHITL", "Executed"],
    }

    def test_document_round_trip_runs_clean(self, tmp_path):
        path = tmp_path / "demo.json"
        path.write_text(json.dumps(self.DOC))
        t = run_scenario(load_scenario_file(path))
        assert t.failures == []
        assert t.outcomes == self.DOC["expected"]

    def test_undefined_belief_name(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["steps"][1]["uses"] = ["ghost"]
        del doc["expected"]
        with pytest.raises(ScenarioError):
            run_scenario(load_scenario(doc))

    def test_expected_length_mismatch(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["expected"] = ["ok"]
        with pytest.raises(ScenarioError):
            load_scenario(doc)

    def test_unknown_op(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["steps"][0] = {"op": "teleport"}
        with pytest.raises(ScenarioError):
            load_scenario(doc)

    def test_expectation_mismatches_reported_not_raised(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["expected"] = ["ok", "ok", "Executed", "Executed"]
        t = run_scenario(load_scenario(doc))
        assert t.failures == [
            {"step": 2, "expected": "Executed", "actual": "PendingHITL"}
        ]

    def test_raw_citation_passthrough(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["steps"][1]["uses"] = [{"raw": "b77"}]
        doc["expected"] = ["ok", "ok", "Denied(R2_MISSING_OR_UNVERIFIABLE_JUST)"]
        doc["steps"] = doc["steps"][:3]
        t = run_scenario(load_scenario(doc))
        assert t.failures == []


class TestDemo:
    def test_before_table(self):
        start = time.monotonic()
        result = demo_mcp_github("before")
        elapsed = time.monotonic() - start
        assert [r.outcome for r in result.rows] == ["✓", "✓", "ALLOW", "Leak"]
        assert elapsed < 1.0

    def test_after_table(self):
        result = demo_mcp_github("after")
        outcomes = [r.outcome for r in result.rows]
        assert outcomes[:2] == ["✓", "✓"]
        assert outcomes[2] == "DENY (R1_LOW_TRUST_HIGH_RISK)"
        assert outcomes[3] == "Unreachable"
        assert not any(r.event == "exec" for r in result.transcript.records)

    def test_unknown_mode(self):
        with pytest.raises(ScenarioError):
            demo_mcp_github("sideways")


AWARE_1L1H = EnumerationParams(
    max_len=6, trust_profile=(TrustLevel.Low,), action_risks=(RiskClass.High,),
    mode=Mode.belief_aware,
)
BLIND_1L1H = EnumerationParams(
    max_len=6, trust_profile=(TrustLevel.Low,), action_risks=(RiskClass.High,),
    mode=Mode.belief_blind,
)


class TestEnumeration:
    def test_aware_mode_has_no_violations(self):
        report = enumerate_traces(AWARE_1L1H)
        assert report.violating == 0
        assert report.witness is None
        assert report.total > 0

    def test_blind_mode_reaches_the_failure_and_returns_minimal_witness(self):
        report = enumerate_traces(BLIND_1L1H)
        assert report.violating >= 1
        w = report.witness
        assert w.log_events == ("recv", "plan", "permit", "exec")
        assert matches_escalation_chain(read_log(w.log_lines))

    def test_every_high_risk_exec_needs_hitl_when_no_low_beliefs(self):
        """All-High alphabet: no violations, and every high-risk exec in every
        enumerated trace passes through an approved HITL permit."""
        scanned = {"execs": 0}

        def scan(records):
            for i, rec in enumerate(records):
                if rec.event != "exec" or not rec.alpha.name.startswith("actH"):
                    continue
                scanned["execs"] += 1
                permits = [
                    r for r in records[:i]
                    if r.event == "permit" and r.alpha.name == rec.alpha.name
                    and r.decision == Verdict.PERMIT
                ]
                assert permits, "high-risk exec without a permit"
                assert permits[-1].hitl is not None
                assert permits[-1].hitl.verdict == "APPROVE"

        report = enumerate_traces(
            EnumerationParams(
                max_len=6, trust_profile=(TrustLevel.High,), action_risks=(RiskClass.High,),
                mode=Mode.belief_aware,
            ),
            on_trace=scan,
        )
        assert report.violating == 0
        assert scanned["execs"] > 0

    def test_budget_is_enforced_not_truncated(self):
        params = EnumerationParams(
            max_len=6, trust_profile=(TrustLevel.Low, TrustLevel.High),
            action_risks=(RiskClass.High, RiskClass.Low), budget=500,
        )
        with pytest.raises(BudgetExceeded):
            enumerate_traces(params)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            EnumerationParams(max_len=0, trust_profile=(), action_risks=(RiskClass.Low,))
        with pytest.raises(ValueError):
            EnumerationParams(max_len=9, trust_profile=(), action_risks=(RiskClass.Low,))
        with pytest.raises(ValueError):
            EnumerationParams(max_len=3, trust_profile=(), action_risks=())

    def test_timeout_branch_is_explored(self):
        """With timeout branches on, pending decisions also resolve via the
        auto-deny path; logs must show the 'timeout' approver."""
        seen = {"timeout": 0}

        def scan(records):
            for r in records:
                if r.event == "permit" and r.hitl is not None and r.hitl.approver == "timeout":
                    assert r.decision == Verdict.DENY
                    seen["timeout"] += 1

        report = enumerate_traces(
            EnumerationParams(
                max_len=4, trust_profile=(TrustLevel.High,), action_risks=(RiskClass.High,),
                mode=Mode.belief_aware,
            ),
            on_trace=scan,
        )
        assert report.violating == 0
        assert seen["timeout"] > 0


class TestRandomTraces:
    def test_same_seed_is_byte_identical(self):
        a = random_traces(seed=1, n=10, p=BLIND_1L1H)
        b = random_traces(seed=1, n=10, p=BLIND_1L1H)
        assert a == b

    def test_different_seeds_differ(self):
        assert random_traces(seed=1, n=10, p=BLIND_1L1H) != random_traces(seed=2, n=10, p=BLIND_1L1H)

    def test_zero_traces(self):
        assert random_traces(seed=1, n=0, p=BLIND_1L1H) == []
