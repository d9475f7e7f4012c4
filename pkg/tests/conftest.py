"""Shared fixture data: a small ransomware campaign and a two-path graph.

The campaign corpus exercises every pipeline stage: seven evidenced
techniques across distinct tactics, one sub-technique pair sharing a
tactic, an exploitation chain down to a CVE, three assets in different
zones, and a control inventory whose benefit/cost pairs produce a strictly
decreasing ratio column.
"""

from __future__ import annotations

import copy

import pytest

from tibsa import (
    AssessorScore,
    cti_from_document,
    default_rubric,
    ingest_catalog,
    landscape_from_document,
    merge_catalogs,
    parse_control_inventory,
)
from tibsa.register import attach_controls, create_assessment, run_pipeline, submit_scores

TECHNIQUES_DOC = {
    "schema_version": "1",
    "kind": "techniques",
    "records": [
        {"id": "T1134", "name": "Access Token Manipulation", "tactic_ids": ["TA0004", "TA0005"],
         "platforms": ["windows"], "attack_pattern_refs": ["CAPEC-633"]},
        {"id": "T1087", "name": "Account Discovery", "tactic_ids": ["TA0007"],
         "platforms": ["windows", "linux"]},
        {"id": "T1110", "name": "Brute Force", "tactic_ids": ["TA0006"],
         "platforms": ["windows", "linux"], "attack_pattern_refs": ["CAPEC-49"]},
        {"id": "T1059", "name": "Command and Scripting Interpreter", "tactic_ids": ["TA0002"],
         "platforms": ["windows", "linux", "macos"]},
        {"id": "T1059.001", "name": "PowerShell", "tactic_ids": ["TA0002"],
         "parent_id": "T1059", "platforms": ["windows"]},
        {"id": "T1059.007", "name": "JavaScript", "tactic_ids": ["TA0002"],
         "parent_id": "T1059", "platforms": ["windows", "macos"]},
        {"id": "T1078", "name": "Valid Accounts", "tactic_ids": ["TA0001", "TA0003"],
         "platforms": ["windows", "linux"]},
        {"id": "T1562", "name": "Impair Defenses", "tactic_ids": ["TA0005"],
         "platforms": ["windows", "linux"]},
        {"id": "T1562.001", "name": "Disable or Modify Tools", "tactic_ids": ["TA0005"],
         "parent_id": "T1562", "platforms": ["windows", "linux"]},
    ],
}

PATTERNS_DOC = {
    "schema_version": "1",
    "kind": "attack_patterns",
    "records": [
        {"id": "CAPEC-633", "name": "Token Impersonation", "weakness_refs": ["CWE-287"]},
        {"id": "CAPEC-49", "name": "Password Brute Forcing", "weakness_refs": ["CWE-307"]},
    ],
}

WEAKNESSES_DOC = {
    "schema_version": "1",
    "kind": "weaknesses",
    "records": [
        {"id": "CWE-287", "name": "Improper Authentication",
         "vulnerability_refs": ["CVE-2024-0001"]},
        {"id": "CWE-307", "name": "Excessive Authentication Attempts",
         "vulnerability_refs": []},
    ],
}

VULNS_DOC = {
    "schema_version": "1",
    "kind": "vulnerabilities",
    "records": [
        {"id": "CVE-2024-0001", "name": "Token forgery in AuthGate", "platforms": ["windows"]},
    ],
}

LANDSCAPE_DOC = {
    "schema_version": "1",
    "assets": [
        {"id": "app-server-1", "name": "Customer portal", "platforms": ["windows"],
         "zone": "internet_facing", "tech_stack": ["iis"]},
        {"id": "dc-1", "name": "Domain controller", "platforms": ["windows"],
         "zone": "internal", "tech_stack": ["active-directory"]},
        {"id": "hr-db", "name": "HR database", "platforms": ["linux"],
         "zone": "internal", "tech_stack": ["postgres"]},
    ],
    "exclusions": [],
}

CTI_DOC = {
    "schema_version": "1",
    "campaign_id": "op-gilded-lynx",
    "actor": "Lynx Syndicate",
    "goals": ["encrypt business data for ransom"],
    "evidence": [
        {"ttp_id": "T1134", "evidence_level": 4, "confidence": 4},
        {"ttp_id": "T1087", "evidence_level": 3, "confidence": 3},
        {"ttp_id": "T1110", "evidence_level": 5, "confidence": 4},
        {"ttp_id": "T1059.001", "evidence_level": 3, "confidence": 5},
        {"ttp_id": "T1059.007", "evidence_level": 2, "confidence": 2},
        {"ttp_id": "T1078", "evidence_level": 4, "confidence": 3},
        {"ttp_id": "T1562.001", "evidence_level": 3, "confidence": 3},
    ],
    "provided_assets": ["hr-db"],
}

# Seven controls whose ratios decrease strictly: 12, 11, 9, 8, 5.3, 2.5, 2.3.
RATIO_CONTROLS_DOC = {
    "schema_version": "1",
    "controls": [
        {"id": "CR-01", "name": "Token hygiene", "cost": {"develop": 1},
         "mitigations": [{"ttp_id": "T1134", "criterion": "PREVENT", "level": "high"}]},
        {"id": "CR-02", "name": "Account review", "cost": {"develop": 1},
         "mitigations": [{"ttp_id": "T1087", "criterion": "DETECT", "level": "high"},
                          {"ttp_id": "T1087", "criterion": "CONSTRAIN", "level": "low"}]},
        {"id": "CR-03", "name": "Lockout policy", "cost": {"develop": 2},
         "mitigations": [{"ttp_id": "T1110", "criterion": "PREVENT", "level": "high"},
                          {"ttp_id": "T1110", "criterion": "DETECT", "level": "medium"}]},
        {"id": "CR-04", "name": "Script control", "cost": {"develop": 2},
         "mitigations": [{"ttp_id": "T1059.001", "criterion": "PREVENT", "level": "high"},
                          {"ttp_id": "T1059.001", "criterion": "DETECT", "level": "low"}]},
        {"id": "CR-05", "name": "Credential vault", "cost": {"develop": 3},
         "mitigations": [{"ttp_id": "T1078", "criterion": "PREVENT", "level": "medium"},
                          {"ttp_id": "T1078", "criterion": "DETECT", "level": "medium"}]},
        {"id": "CR-06", "name": "EDR tamper guard", "cost": {"develop": 4},
         "mitigations": [{"ttp_id": "T1562.001", "criterion": "PREVENT", "level": "medium"}]},
        {"id": "CR-07", "name": "Browser isolation", "cost": {"develop": 3},
         "mitigations": [{"ttp_id": "T1059.007", "criterion": "CONSTRAIN", "level": "high"}]},
    ],
}

# Reference coverage rows in coded cell notation; rule-sum benefits for
# these cells: 48, 25, 7, 43, 5, 23, 45.
TABLE_CELLS = {
    "ST7.C098": {"T1134": "PR.H DT.H", "T1087": "PR.H DT.H",
                  "T1059.001": "CS.M", "T1059.007": "CS.L"},
    "ST6.C121": {"T1134": "PR.H", "T1110": "DT.M", "T1059.001": "DT.M RE.L"},
    "ST1.C007": {"T1110": "CS.M", "T1078": "RE.L", "T1562.001": "RE.L"},
    "ST5.C051": {"T1087": "DT.M CS.M", "T1110": "PR.L DT.L",
                  "T1059.007": "RE.H", "T1562.001": "PR.M CS.M"},
    "ST9.C101": {"T1078": "RE.H"},
    "ST5.C054": {"T1087": "DT.H", "T1059.007": "CS.H DT.H"},
    "ST3.C038": {"T1134": "PR.L DT.H", "T1110": "PR.L DT.H",
                  "T1059.001": "CS.M", "T1078": "RE.M", "T1562.001": "RE.H"},
}
TABLE_COSTS = {
    "ST7.C098": 1, "ST6.C121": 1, "ST1.C007": 2, "ST5.C051": 2,
    "ST9.C101": 3, "ST5.C054": 4, "ST3.C038": 3,
}

# Two techniques, two assets, one goal: the minimal adversary-replan graph.
PARADOX_KB_DOC = {
    "schema_version": "1",
    "kind": "techniques",
    "records": [
        {"id": "TX-A", "name": "Door A", "tactic_ids": ["TAX"], "platforms": ["windows"]},
        {"id": "TX-B", "name": "Door B", "tactic_ids": ["TAX"], "platforms": ["linux"]},
    ],
}

PARADOX_LANDSCAPE_DOC = {
    "schema_version": "1",
    "assets": [
        {"id": "srv-win", "name": "Win server", "platforms": ["windows"],
         "zone": "internet_facing"},
        {"id": "srv-lin", "name": "Linux server", "platforms": ["linux"],
         "zone": "internal"},
    ],
}

PARADOX_CTI_DOC = {
    "schema_version": "1",
    "campaign_id": "op-two-doors",
    "actor": "Copper Wolf",
    "goals": ["steal finance records"],
    "evidence": [
        {"ttp_id": "TX-A", "evidence_level": 5, "confidence": 5},
        {"ttp_id": "TX-B", "evidence_level": 5, "confidence": 4},
    ],
}

SCOPED_TTPS = ["T1059.001", "T1059.007", "T1078", "T1087", "T1110", "T1134", "T1562.001"]


def score_values(**overrides: int) -> dict[str, int]:
    base = {
        "evidence": 4, "skill-required": 3, "applicability": 3,
        "positioning-effect": 2, "recovery-time": 3, "restore-cost": 3,
        "detectability": 2, "graph-confidence": 4,
    }
    base.update(overrides)
    return base


def submit_panel_scores(assessment, assessors=("alice", "bola"), **overrides) -> None:
    scores = [
        AssessorScore(who, tid, score_values(**overrides))
        for who in assessors
        for tid in assessment.scoped_ttps
    ]
    submit_scores(assessment, scores, now="2026-08-14T00:01:00Z")


def build_campaign_kb():
    kb = ingest_catalog(copy.deepcopy(TECHNIQUES_DOC), "techniques")
    for doc, kind in ((PATTERNS_DOC, "attack_patterns"), (WEAKNESSES_DOC, "weaknesses"),
                      (VULNS_DOC, "vulnerabilities")):
        kb = merge_catalogs(kb, ingest_catalog(copy.deepcopy(doc), kind))
    return kb


@pytest.fixture
def campaign_kb():
    return build_campaign_kb()


@pytest.fixture
def campaign_cti():
    return cti_from_document(copy.deepcopy(CTI_DOC))


@pytest.fixture
def campaign_landscape():
    return landscape_from_document(copy.deepcopy(LANDSCAPE_DOC))


@pytest.fixture
def ratio_controls():
    return parse_control_inventory(copy.deepcopy(RATIO_CONTROLS_DOC))


@pytest.fixture
def draft_assessment(campaign_kb, campaign_cti, campaign_landscape):
    return create_assessment(
        "full", campaign_kb, campaign_cti, campaign_landscape, default_rubric(),
        assessment_id="a-lynx", now="2026-08-14T00:00:00Z",
    )


@pytest.fixture
def evaluated_assessment(draft_assessment, ratio_controls):
    submit_panel_scores(draft_assessment)
    controls, entries = ratio_controls
    attach_controls(draft_assessment, controls, entries, now="2026-08-14T00:02:00Z")
    run_pipeline(draft_assessment, now="2026-08-14T00:03:00Z")
    return draft_assessment


@pytest.fixture
def paradox_world():
    kb = ingest_catalog(copy.deepcopy(PARADOX_KB_DOC), "techniques")
    cti = cti_from_document(copy.deepcopy(PARADOX_CTI_DOC))
    landscape = landscape_from_document(copy.deepcopy(PARADOX_LANDSCAPE_DOC))
    return kb, cti, landscape
