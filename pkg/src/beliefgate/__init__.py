"""Belief-aware authorization monitor for agent tool calls.

Beliefs carry provenance labels from the moment they enter a run; intents
must cite the beliefs they consumed; a policy enforcement point denies
high-risk actions justified by low-trust beliefs and routes trusted
high-risk actions through human approval. Every transition lands in an
append-only log from which the safety property can be re-checked offline.
"""

from .domain import (
    ActionSpec,
    Belief,
    BeliefLabel,
    Intent,
    IntentClass,
    Justification,
    JustificationEntry,
    ProvenanceClass,
    RiskClass,
    RiskTable,
    TrustLevel,
    classify_risk,
    validate_belief,
)
from .trust import (
    Attestation,
    TrustConfig,
    TrustEval,
    aggregate,
    evaluate_justification,
    ingress_provenance,
    justification_trust,
)
from .pep import Decision, Reason, ScopeSet, Verdict, decide_belief_aware, decide_belief_blind
from .monitor import ExecOutcome, ExecStatus, HitlVerdict, Mode, MonitorRun, counter_clock
from .audit import (
    AuditRecord,
    FileSink,
    HitlNote,
    MemorySink,
    Violation,
    ViolationKind,
    backward_slice,
    check_trace_safety,
    read_log,
)
from .hitl import HitlGateway, PendingDecision
from .simlab import (
    EnumerationParams,
    EnumerationReport,
    Scenario,
    Transcript,
    demo_mcp_github,
    enumerate_traces,
    load_scenario,
    load_scenario_file,
    matches_escalation_chain,
    mcp_github_scenario,
    random_traces,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSpec",
    "Attestation",
    "AuditRecord",
    "Belief",
    "BeliefLabel",
    "Decision",
    "EnumerationParams",
    "EnumerationReport",
    "ExecOutcome",
    "ExecStatus",
    "FileSink",
    "HitlGateway",
    "HitlNote",
    "HitlVerdict",
    "Intent",
    "IntentClass",
    "Justification",
    "JustificationEntry",
    "MemorySink",
    "Mode",
    "MonitorRun",
    "PendingDecision",
    "ProvenanceClass",
    "Reason",
    "RiskClass",
    "RiskTable",
    "Scenario",
    "ScopeSet",
    "Transcript",
    "TrustConfig",
    "TrustEval",
    "TrustLevel",
    "Verdict",
    "Violation",
    "ViolationKind",
    "aggregate",
    "backward_slice",
    "check_trace_safety",
    "classify_risk",
    "counter_clock",
    "decide_belief_aware",
    "decide_belief_blind",
    "demo_mcp_github",
    "enumerate_traces",
    "evaluate_justification",
    "ingress_provenance",
    "justification_trust",
    "load_scenario",
    "load_scenario_file",
    "matches_escalation_chain",
    "mcp_github_scenario",
    "random_traces",
    "read_log",
    "run_scenario",
    "validate_belief",
]
