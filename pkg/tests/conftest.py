import pathlib

import pytest

from beliefgate.domain import (
    ActionSpec,
    BeliefLabel,
    Intent,
    IntentClass,
    Justification,
    JustificationEntry,
    ProvenanceClass,
    RiskClass,
    RiskTable,
)
from beliefgate.pep import ScopeSet
from beliefgate.trust import TrustConfig

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA_DIR


@pytest.fixture
def cfg() -> TrustConfig:
    return TrustConfig(theta=0.5)


def make_label(src="chan", int_class=IntentClass.Factual, age=0, path=None) -> BeliefLabel:
    return BeliefLabel(src=src, int_class=int_class, age=age, path=tuple(path or (src,)))


def make_entry(
    belief_id="b1",
    tau_epi=0.9,
    tau_prov=ProvenanceClass.attested,
    label=None,
) -> JustificationEntry:
    return JustificationEntry(
        belief_id=belief_id,
        label=label if label is not None else make_label(),
        tau_epi=tau_epi,
        tau_prov=tau_prov,
    )


def make_intent(action_name="post_comment", entries=()) -> Intent:
    return Intent(
        action=ActionSpec(name=action_name, args={}, target="t"),
        just=Justification(tuple(entries)),
    )


@pytest.fixture
def mcp_risk_table() -> RiskTable:
    return RiskTable(rules=(("post_comment", RiskClass.High),), default=RiskClass.Low)


@pytest.fixture
def mcp_scope() -> ScopeSet:
    return ScopeSet(frozenset({"read_issue", "read_file", "post_comment"}))
