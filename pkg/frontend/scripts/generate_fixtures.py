"""Regenerate canned gateway responses used by the workbench test suite.

Drives the real HTTP app in-process against two small worlds (a four
technique campaign and a two door replan scenario) and writes every raw
response body, byte for byte as JSON, into tests/fixtures/. Workbench
tests never compute engine numbers; they compare rendered output against
these payloads.

Run from the repository root: python3 frontend/scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from tibsa import ingest_catalog
from tibsa.config import GatewayConfig
from tibsa.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

WORKBENCH_KB = ingest_catalog({
    "schema_version": "1",
    "kind": "techniques",
    "records": [
        {"id": "LN-A", "name": "Mailbox Rule Abuse", "tactic_ids": ["TAW1"],
         "platforms": ["windows"]},
        {"id": "LN-B", "name": "Service Stop", "tactic_ids": ["TAW2"],
         "platforms": ["windows"]},
        {"id": "LN-C", "name": "Scheduled Task", "tactic_ids": ["TAW1"],
         "platforms": ["windows"]},
        {"id": "LN-D", "name": "Firmware Implant", "tactic_ids": ["TAW3"],
         "platforms": ["solaris"]},
    ],
}, "techniques").to_document()

WORKBENCH_CTI = {
    "schema_version": "1",
    "campaign_id": "op-workbench",
    "actor": "Fixture Actor",
    "goals": ["exfiltrate payroll archive"],
    "evidence": [
        {"ttp_id": "LN-A", "evidence_level": 4, "confidence": 4},
        {"ttp_id": "LN-B", "evidence_level": 5, "confidence": 5},
        {"ttp_id": "LN-C", "evidence_level": 2, "confidence": 3},
        {"ttp_id": "LN-D", "evidence_level": 3, "confidence": 3},
    ],
}

WORKBENCH_LANDSCAPE = {
    "schema_version": "1",
    "assets": [
        {"id": "ws-edge", "name": "Edge workstation", "platforms": ["windows"],
         "zone": "internet_facing", "tech_stack": ["nginx"]},
    ],
}

WORKBENCH_CONTROLS = {
    "schema_version": "1",
    "controls": [
        {"id": "CN-1", "name": "Mail rule monitor", "cost": {"develop": 1},
         "mitigations": [{"ttp_id": "LN-A", "criterion": "PREVENT", "level": "high"}]},
        {"id": "CN-2", "name": "Service watchdog", "cost": {"develop": 2},
         "mitigations": [{"ttp_id": "LN-B", "criterion": "DETECT", "level": "low"}]},
        {"id": "CN-3", "name": "Task audit", "cost": {"develop": 4},
         "mitigations": [{"ttp_id": "LN-C", "criterion": "DETECT", "level": "medium"},
                          {"ttp_id": "LN-C", "criterion": "CONSTRAIN", "level": "low"}]},
    ],
}

PARADOX_KB = ingest_catalog({
    "schema_version": "1",
    "kind": "techniques",
    "records": [
        {"id": "TX-A", "name": "Door A", "tactic_ids": ["TAX"], "platforms": ["windows"]},
        {"id": "TX-B", "name": "Door B", "tactic_ids": ["TAX"], "platforms": ["linux"]},
    ],
}, "techniques").to_document()

PARADOX_CTI = {
    "schema_version": "1",
    "campaign_id": "op-two-doors",
    "actor": "Copper Wolf",
    "goals": ["steal finance records"],
    "evidence": [
        {"ttp_id": "TX-A", "evidence_level": 5, "confidence": 5},
        {"ttp_id": "TX-B", "evidence_level": 5, "confidence": 4},
    ],
}

PARADOX_LANDSCAPE = {
    "schema_version": "1",
    "assets": [
        {"id": "srv-win", "name": "Win server", "platforms": ["windows"],
         "zone": "internet_facing"},
        {"id": "srv-lin", "name": "Linux server", "platforms": ["linux"],
         "zone": "internal"},
    ],
}

PARADOX_CONTROLS = {
    "schema_version": "1",
    "controls": [
        {"id": "PD-DT", "name": "Door A camera", "cost": {"develop": 1},
         "mitigations": [{"ttp_id": "TX-A", "criterion": "DETECT", "level": "high"}]},
    ],
}


def score_values(**overrides: int) -> dict[str, int]:
    base = {
        "evidence": 4, "skill-required": 3, "applicability": 3,
        "positioning-effect": 2, "recovery-time": 3, "restore-cost": 3,
        "detectability": 2, "graph-confidence": 4,
    }
    base.update(overrides)
    return base


def write(name: str, body: object) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(body, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(GatewayConfig(register_path=f"{tmp}/register.json")))

        created = client.post("/assessments", json={
            "id": "a-workbench",
            "kb": WORKBENCH_KB,
            "cti": WORKBENCH_CTI,
            "landscape": WORKBENCH_LANDSCAPE,
            "controls": WORKBENCH_CONTROLS,
        })
        assert created.status_code == 201, created.text
        write("assessment_created.json", created.json())

        bad = client.post("/assessments/a-workbench/scores", json={
            "assessor_id": "alice", "ttp_id": "LN-A",
            "values": score_values(evidence=6),
        })
        assert bad.status_code == 400, bad.text
        write("scores_error.json", bad.json())

        partial = client.post("/assessments/a-workbench/scores", json={
            "assessor_id": "alice", "ttp_id": "LN-A",
            "values": score_values(detectability=1),
        })
        assert partial.status_code == 200, partial.text
        assert partial.json()["pipeline_ran"] is False
        write("scores_partial.json", partial.json())

        # Alice and Bola disagree by 3 on LN-A detectability: divergence badge.
        rest = [
            {"assessor_id": "alice", "ttp_id": "LN-B", "values": score_values()},
            {"assessor_id": "alice", "ttp_id": "LN-C", "values": score_values(evidence=2)},
            {"assessor_id": "bola", "ttp_id": "LN-A", "values": score_values(detectability=4)},
            {"assessor_id": "bola", "ttp_id": "LN-B", "values": score_values()},
            {"assessor_id": "bola", "ttp_id": "LN-C", "values": score_values(evidence=2)},
        ]
        accepted = client.post("/assessments/a-workbench/scores", json={"scores": rest})
        assert accepted.status_code == 200, accepted.text
        assert accepted.json()["pipeline_ran"] is True, accepted.text
        write("scores_accepted.json", accepted.json())

        detail = client.get("/assessments/a-workbench")
        assert detail.status_code == 200
        write("assessment.json", detail.json())
        frozen_hash = detail.json()["content_hash"]

        for name, path in [
            ("classifications.json", "/assessments/a-workbench/classifications"),
            ("ranking.json", "/assessments/a-workbench/ranking"),
            ("controls_ranking.json", "/assessments/a-workbench/controls/ranking"),
            ("graph.json", "/graph/a-workbench"),
        ]:
            resp = client.get(path)
            assert resp.status_code == 200, f"{path}: {resp.text}"
            write(name, resp.json())

        empty = client.post("/assessments/a-workbench/whatif", json={"changes": []})
        assert empty.status_code == 200, empty.text
        write("whatif_empty.json", empty.json())

        upgrade = client.post("/assessments/a-workbench/whatif", json={"changes": [
            {"op": "change_level", "control_id": "CN-2", "ttp_id": "LN-B",
             "criterion": "DETECT", "new_level": "high"},
        ]})
        assert upgrade.status_code == 200, upgrade.text
        assert upgrade.json()["changes"][0]["benefit_delta"] == 4, upgrade.text
        write("whatif_upgrade.json", upgrade.json())

        after = client.get("/assessments/a-workbench")
        assert after.json()["content_hash"] == frozen_hash, "whatif mutated the assessment"

        missing = client.get("/assessments/no-such-id")
        assert missing.status_code == 404
        write("error_not_found.json", missing.json())

        pd = client.post("/assessments", json={
            "id": "a-paradox",
            "kb": PARADOX_KB,
            "cti": PARADOX_CTI,
            "landscape": PARADOX_LANDSCAPE,
            "controls": PARADOX_CONTROLS,
        })
        assert pd.status_code == 201, pd.text
        panel = [
            {"assessor_id": who, "ttp_id": tid, "values": score_values()}
            for who in ("alice", "bola") for tid in ("TX-A", "TX-B")
        ]
        done = client.post("/assessments/a-paradox/scores", json={"scores": panel})
        assert done.status_code == 200 and done.json()["pipeline_ran"], done.text

        pd_detail = client.get("/assessments/a-paradox")
        write("paradox_assessment.json", pd_detail.json())
        pd_hash = pd_detail.json()["content_hash"]

        paradox = client.post("/assessments/a-paradox/whatif", json={"changes": [
            {"op": "add_control", "control": {
                "id": "PD-PR", "name": "Door A lock", "cost": {"develop": 1},
                "mitigations": [{"ttp_id": "TX-A", "criterion": "PREVENT", "level": "high"}],
            }},
        ]})
        assert paradox.status_code == 200, paradox.text
        assert paradox.json()["paradox"] is True, paradox.text
        write("whatif_paradox.json", paradox.json())

        pd_after = client.get("/assessments/a-paradox")
        assert pd_after.json()["content_hash"] == pd_hash, "whatif mutated the assessment"


if __name__ == "__main__":
    main()
