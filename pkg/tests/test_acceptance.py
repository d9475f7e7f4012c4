"""Acceptance gate: exact-constant, oracle, and property-based checks.

Each test here pins one release criterion. Expected constants are written
out literally; property tests regenerate their inputs from fixed seeds and
verify against independent brute-force accumulators.
"""

from __future__ import annotations

import copy
import json
import random

import pytest
from fastapi.testclient import TestClient

from tibsa import (
    AssessorScore,
    CausalEdge,
    CausalGraph,
    CausalNode,
    ControlEvaluation,
    EdgeRelation,
    EffectivenessLevel,
    GatewayConfig,
    MatrixConfigError,
    MitigationEntry,
    NodeKind,
    RiskRegister,
    TtpClass,
    aggregate,
    bc_ratio,
    build_graph,
    classify_ttps,
    control_benefit,
    create_assessment,
    cti_from_document,
    default_matrix,
    default_rubric,
    enumerate_paths,
    format_ratio,
    ingest_catalog,
    landscape_from_document,
    load_register,
    matrix_from_document,
    mitigation_score,
    rank_controls,
    rank_ttps,
    replan_after_control,
    rubric_from_document,
    run_pipeline,
    save_register,
    submit_scores,
    whatif,
)
from tibsa.cli import main
from tibsa.effectiveness import parse_control_inventory
from tibsa.register import attach_controls
from tibsa.report import generate_report
from tibsa.service import create_app

from conftest import (
    CTI_DOC,
    LANDSCAPE_DOC,
    PARADOX_CTI_DOC,
    PARADOX_KB_DOC,
    PARADOX_LANDSCAPE_DOC,
    RATIO_CONTROLS_DOC,
    SCOPED_TTPS,
    build_campaign_kb,
    score_values,
)

H, M, L = EffectivenessLevel.HIGH, EffectivenessLevel.MEDIUM, EffectivenessLevel.LOW


def test_score_matrix_constants():
    expected = {
        ("PREVENT", H): 12, ("PREVENT", M): 10, ("PREVENT", L): 8,
        ("DETECT", H): 8, ("DETECT", M): 6, ("DETECT", L): 4,
        ("CONSTRAIN", H): 7, ("CONSTRAIN", M): 5, ("CONSTRAIN", L): 3,
        ("RECOVER", H): 5, ("RECOVER", M): 3, ("RECOVER", L): 1,
    }
    for (criterion, level), value in expected.items():
        assert mitigation_score(criterion, level) == value


def test_published_ratio_column_and_ordering():
    rows = [
        ("ST7.C098", 12, 1), ("ST6.C121", 11, 1), ("ST5.C051", 18, 2),
        ("ST3.C038", 16, 2), ("ST5.C054", 16, 3), ("ST1.C007", 10, 4),
        ("ST9.C101", 7, 3),
    ]
    displays = [format_ratio(bc_ratio(benefit, cost)) for _, benefit, cost in rows]
    assert displays == ["12", "11", "9", "8", "5.3", "2.5", "2.3"]

    evaluations = [
        ControlEvaluation(control_id=cid, benefit=benefit, cost=float(cost),
                          ratio=bc_ratio(benefit, cost))
        for cid, benefit, cost in rows
    ]
    shuffled = list(evaluations)
    random.Random(2).shuffle(shuffled)
    assert [e.control_id for e in rank_controls(shuffled)] == [cid for cid, _, _ in rows]


def test_benefit_rule_against_brute_force_oracle():
    table = {
        ("PREVENT", H): 12, ("PREVENT", M): 10, ("PREVENT", L): 8,
        ("DETECT", H): 8, ("DETECT", M): 6, ("DETECT", L): 4,
        ("CONSTRAIN", H): 7, ("CONSTRAIN", M): 5, ("CONSTRAIN", L): 3,
        ("RECOVER", H): 5, ("RECOVER", M): 3, ("RECOVER", L): 1,
    }
    rng = random.Random(41)
    slots = [(f"T-{i}", criterion)
             for i in range(5)
             for criterion in ("PREVENT", "DETECT", "CONSTRAIN", "RECOVER")]
    for _ in range(1000):
        chosen = rng.sample(slots, rng.randint(0, 12))
        entries = []
        expected = 0
        for ttp_id, criterion in chosen:
            level = rng.choice((H, M, L))
            entries.append(MitigationEntry(control_id="c", ttp_id=ttp_id,
                                           criterion=criterion, level=level))
            expected += table[(criterion, level)]
        assert control_benefit(entries) == expected


def test_matrix_order_invariants_enforced():
    matrix = default_matrix()
    for stronger, weaker in zip(matrix.criteria, matrix.criteria[1:]):
        for level in (H, M, L):
            assert stronger.scores[level] >= weaker.scores[level]
    for criterion in matrix.criteria:
        assert criterion.scores[H] > criterion.scores[M] > criterion.scores[L] > 0

    def document(**scores_by_name):
        base = {
            "PREVENT": {"high": 12, "medium": 10, "low": 8},
            "DETECT": {"high": 8, "medium": 6, "low": 4},
        }
        base.update(scores_by_name)
        return {
            "schema_version": "1",
            "criteria": [{"name": name, "code": name[:2], "scores": scores}
                         for name, scores in base.items()],
        }

    assert matrix_from_document(document()).criterion_names() == ("PREVENT", "DETECT")
    with pytest.raises(MatrixConfigError, match="strictly decrease"):
        matrix_from_document(document(DETECT={"high": 6, "medium": 6, "low": 4}))
    with pytest.raises(MatrixConfigError, match="dominate"):
        matrix_from_document(document(DETECT={"high": 13, "medium": 6, "low": 4}))
    with pytest.raises(MatrixConfigError, match="positive"):
        matrix_from_document(document(DETECT={"high": 8, "medium": 6, "low": 0}))


def test_risk_paradox_both_directions_deterministic():
    kb = ingest_catalog(copy.deepcopy(PARADOX_KB_DOC), "techniques")
    cti = cti_from_document(copy.deepcopy(PARADOX_CTI_DOC))
    landscape = landscape_from_document(copy.deepcopy(PARADOX_LANDSCAPE_DOC))
    graph = build_graph(kb, cti, landscape)
    classifications = classify_ttps(graph, kb, cti, landscape)

    watched = [MitigationEntry("c-dt", "TX-A", "DETECT", H)]
    blocked = watched + [MitigationEntry("c-pr", "TX-A", "PREVENT", H)]
    countered = blocked + [MitigationEntry("c-dt2", "TX-B", "DETECT", H)]

    def replan(before, after):
        return replan_after_control(graph, classifications, before, after,
                                    landscape=landscape)

    shifted = replan(watched, blocked)
    assert shifted.paradox is True
    assert shifted.old_path.nodes == ("TX-A", "srv-win", "goal:1")
    assert shifted.new_path.nodes == ("TX-B", "srv-lin", "goal:1")

    covered = replan(watched, countered)
    assert covered.paradox is False
    assert covered.new_path.nodes == ("TX-B", "srv-lin", "goal:1")

    for _ in range(3):
        assert replan(watched, blocked).to_dict() == shifted.to_dict()
        assert replan(watched, countered).to_dict() == covered.to_dict()


PLATFORMS = ("windows", "linux", "macos", "solaris")
TACTICS = ("TA1", "TA2", "TA3")
CLASS_RANK = {
    TtpClass.EXCLUDED: 0, TtpClass.POSSIBLE_ONLY: 1,
    TtpClass.PLAUSIBLE: 2, TtpClass.PROBABLE: 3,
}


def random_world(rng: random.Random):
    count = rng.randint(3, 8)
    records = [
        {
            "id": f"TT-{i:02d}", "name": f"technique {i}",
            "tactic_ids": sorted(rng.sample(TACTICS, rng.randint(1, 2))),
            "platforms": sorted(rng.sample(PLATFORMS, rng.randint(1, 3))),
        }
        for i in range(count)
    ]
    kb = ingest_catalog({"schema_version": "1", "kind": "techniques",
                         "records": records}, "techniques")
    assets = [
        {
            "id": f"as-{i}", "name": f"asset {i}",
            "platforms": sorted(rng.sample(PLATFORMS, rng.randint(1, 2))),
            "zone": rng.choice(("internet_facing", "internal")),
        }
        for i in range(rng.randint(1, 4))
    ]
    evidenced = sorted(rng.sample([r["id"] for r in records], rng.randint(1, count)))
    exclusions = []
    if rng.random() < 0.3:
        exclusions.append({"ttp_id": rng.choice(evidenced), "reason": "policy forbids"})
    landscape = landscape_from_document({
        "schema_version": "1", "assets": assets, "exclusions": exclusions,
    })
    cti_doc = {
        "schema_version": "1", "campaign_id": "c-random", "goals": ["reach data"],
        "evidence": [
            {"ttp_id": tid, "evidence_level": rng.randint(1, 5),
             "confidence": rng.randint(1, 5)}
            for tid in evidenced
        ],
    }
    return kb, cti_doc, landscape


def test_classification_properties_on_random_worlds():
    rng = random.Random(97)
    for _ in range(500):
        kb, cti_doc, landscape = random_world(rng)
        cti = cti_from_document(copy.deepcopy(cti_doc))
        graph = build_graph(kb, cti, landscape)
        classes = classify_ttps(graph, kb, cti, landscape)

        by_id = {c.ttp_id: c for c in classes}
        assert len(by_id) == len(classes), "each TTP classified exactly once"
        assert set(by_id) == {e["ttp_id"] for e in cti_doc["evidence"]}

        grouped: dict[TtpClass, set[str]] = {cls: set() for cls in TtpClass}
        for c in classes:
            grouped[c.ttp_class].add(c.ttp_id)
        possible = set(by_id) - grouped[TtpClass.EXCLUDED]
        assert grouped[TtpClass.PROBABLE] <= possible
        assert not grouped[TtpClass.PLAUSIBLE] & grouped[TtpClass.PROBABLE]

        # Raising one TTP's evidence level never demotes it.
        target = rng.choice(cti_doc["evidence"])
        if target["evidence_level"] < 5:
            bumped_doc = copy.deepcopy(cti_doc)
            for row in bumped_doc["evidence"]:
                if row["ttp_id"] == target["ttp_id"]:
                    row["evidence_level"] = 5
            bumped = cti_from_document(bumped_doc)
            bumped_classes = classify_ttps(build_graph(kb, bumped, landscape),
                                           kb, bumped, landscape)
            after = next(c for c in bumped_classes if c.ttp_id == target["ttp_id"])
            assert CLASS_RANK[after.ttp_class] >= CLASS_RANK[by_id[target["ttp_id"]].ttp_class]

        rapid = create_assessment("rapid", kb, cti, landscape)
        full = create_assessment("full", kb, cti, landscape)
        assert set(rapid.scoped_ttps) <= set(full.scoped_ttps)


def test_multi_parent_beats_tree_restriction():
    nodes = [
        CausalNode(id="T", kind=NodeKind.TECHNIQUE, label="entry"),
        CausalNode(id="P1", kind=NodeKind.ATTACK_PATTERN, label="route one"),
        CausalNode(id="P2", kind=NodeKind.ATTACK_PATTERN, label="route two"),
        CausalNode(id="W", kind=NodeKind.WEAKNESS, label="shared flaw"),
        CausalNode(id="goal:1", kind=NodeKind.GOAL, label="goal"),
    ]
    edges = [
        CausalEdge("T", "P1", EdgeRelation.USES, 3),
        CausalEdge("T", "P2", EdgeRelation.USES, 3),
        CausalEdge("P1", "W", EdgeRelation.EXPLOITS, 3),
        CausalEdge("P2", "W", EdgeRelation.EXPLOITS, 3),
        CausalEdge("W", "goal:1", EdgeRelation.LEADS_TO, 3),
    ]
    diamond = CausalGraph(nodes=nodes, edges=edges)
    assert len(enumerate_paths(diamond, "goal:1")) == 2

    parented: set[str] = set()
    kept = []
    for edge in sorted(edges, key=lambda e: (e.source, e.target)):
        if edge.target in parented:
            continue
        parented.add(edge.target)
        kept.append(edge)
    tree = CausalGraph(nodes=nodes, edges=kept)
    tree_paths = enumerate_paths(tree, "goal:1")
    assert len(tree_paths) == 1
    assert len(enumerate_paths(diamond, "goal:1")) > len(tree_paths)


def test_aggregation_properties():
    rng = random.Random(13)
    rubric = default_rubric()
    ids = rubric.criterion_ids()

    for _ in range(200):
        panel = [
            AssessorScore(f"w{k}", "T1", {cid: rng.randint(1, 5) for cid in ids})
            for k in range(rng.randint(1, 5))
        ]
        agg = aggregate(rubric, panel)
        for cid in ids:
            values = [s.values[cid] for s in panel]
            assert min(values) <= agg.means[cid] <= max(values)
            assert agg.ranges[cid] == max(values) - min(values)
            assert (cid in agg.divergence) == (agg.ranges[cid] >= 3)

    pair = [AssessorScore("a", "T1", score_values(evidence=1)),
            AssessorScore("b", "T1", score_values(evidence=4))]
    assert "evidence" in aggregate(rubric, pair).divergence
    pair[1].values["evidence"] = 3
    assert "evidence" not in aggregate(rubric, pair).divergence

    doc = default_rubric().to_dict()
    for criterion in doc["criteria"]:
        criterion["weight"] = rng.randint(1, 4)
    scaled_doc = copy.deepcopy(doc)
    for criterion in scaled_doc["criteria"]:
        criterion["weight"] *= 3
    base_rubric = rubric_from_document(doc)
    scaled_rubric = rubric_from_document(scaled_doc)

    panels = {
        f"T-{i}": [AssessorScore(f"w{k}", f"T-{i}",
                                 {cid: rng.randint(1, 5) for cid in ids})
                   for k in range(2)]
        for i in range(6)
    }
    base = [aggregate(base_rubric, panel) for panel in panels.values()]
    scaled = [aggregate(scaled_rubric, panel) for panel in panels.values()]
    for lo, hi in zip(base, scaled):
        assert hi.weighted_total == pytest.approx(3 * lo.weighted_total, rel=1e-12)
    assert [a.ttp_id for a in rank_ttps(base)] == [a.ttp_id for a in rank_ttps(scaled)]


def random_scores(rng: random.Random, assessment) -> list[AssessorScore]:
    ids = assessment.rubric.criterion_ids()
    return [
        AssessorScore(who, tid, {cid: rng.randint(1, 5) for cid in ids})
        for who in ("ana", "bo")
        for tid in assessment.scoped_ttps
    ]


def test_determinism_and_persistence(tmp_path, evaluated_assessment):
    first_hash = evaluated_assessment.content_hash()
    run_pipeline(evaluated_assessment)
    assert evaluated_assessment.content_hash() == first_hash

    rng = random.Random(23)
    kb = build_campaign_kb()
    cti = cti_from_document(copy.deepcopy(CTI_DOC))
    landscape = landscape_from_document(copy.deepcopy(LANDSCAPE_DOC))
    pool = []
    for i in range(10):
        assessment = create_assessment(rng.choice(("full", "rapid")), kb, cti, landscape,
                                       assessment_id=f"a-r{i:02d}")
        if rng.random() < 0.8:
            submit_scores(assessment, random_scores(rng, assessment))
            if rng.random() < 0.8:
                attach_controls(assessment,
                                *parse_control_inventory(copy.deepcopy(RATIO_CONTROLS_DOC)))
                run_pipeline(assessment)
                if rng.random() < 0.5:
                    generate_report(assessment)
        pool.append(assessment)

    for i in range(100):
        register = RiskRegister()
        for assessment in rng.sample(pool, rng.randint(1, 4)):
            register.put(assessment, who=rng.choice(("ana", "bo", "cy")),
                         what=f"note {rng.randint(0, 999)}")
        path = tmp_path / f"register-{i:03d}.json"
        save_register(register, path)
        assert load_register(path) == register

    snapshot = evaluated_assessment.to_dict()
    mitigated = list(evaluated_assessment.mitigations)
    for i in range(50):
        kind = rng.choice(("change_level", "remove_control", "add_control"))
        if kind == "change_level":
            entry = rng.choice(mitigated)
            change = {"op": "change_level", "control_id": entry.control_id,
                      "ttp_id": entry.ttp_id, "criterion": entry.criterion,
                      "new_level": rng.choice(("low", "medium", "high"))}
        elif kind == "remove_control":
            change = {"op": "remove_control",
                      "control_id": rng.choice(evaluated_assessment.control_ranking)}
        else:
            change = {"op": "add_control",
                      "control": {"id": f"XX-{i}", "cost": {"develop": rng.randint(1, 3)},
                                  "mitigations": [{"ttp_id": rng.choice(SCOPED_TTPS),
                                                   "criterion": rng.choice(("PR", "DT", "CS", "RE")),
                                                   "level": rng.choice(("low", "medium", "high"))}]}}
        whatif(evaluated_assessment, [change])
        assert evaluated_assessment.to_dict() == snapshot


def test_cli_and_http_interfaces_agree(tmp_path, capsys):
    documents = {
        "kb.json": build_campaign_kb().to_document(),
        "cti.json": CTI_DOC,
        "landscape.json": LANDSCAPE_DOC,
        "controls.json": RATIO_CONTROLS_DOC,
        "scores.json": {
            "scores": [
                {"assessor_id": who, "ttp_id": tid, "values": score_values()}
                for who in ("alice", "bola")
                for tid in SCOPED_TTPS
            ],
        },
    }
    for name, payload in documents.items():
        (tmp_path / name).write_text(json.dumps(payload), encoding="utf-8")
    register = tmp_path / "cli-register.json"

    def run_json(*argv: str) -> dict:
        assert main(list(argv)) == 0
        return json.loads(capsys.readouterr().out)

    run_json("create", "--kb", str(tmp_path / "kb.json"),
             "--cti", str(tmp_path / "cti.json"),
             "--landscape", str(tmp_path / "landscape.json"),
             "--id", "a-both", "--register", str(register))
    run_json("score", "submit", "--assessment", "a-both",
             "--scores", str(tmp_path / "scores.json"), "--register", str(register))
    cli_controls = run_json("evaluate", "--controls", str(tmp_path / "controls.json"),
                            "--assessment", "a-both", "--register", str(register))
    cli_ttps = run_json("rank", "--assessment", "a-both", "--kind", "ttps",
                        "--register", str(register))

    app = create_app(GatewayConfig(register_path=str(tmp_path / "http-register.json")))
    client = TestClient(app)
    created = client.post("/assessments", json={
        "id": "a-both",
        "kb": documents["kb.json"],
        "cti": documents["cti.json"],
        "landscape": documents["landscape.json"],
        "controls": documents["controls.json"],
    })
    assert created.status_code == 201
    scored = client.post("/assessments/a-both/scores", json=documents["scores.json"])
    assert scored.json()["pipeline_ran"] is True
    http_controls = client.get("/assessments/a-both/controls/ranking").json()
    http_ttps = client.get("/assessments/a-both/ranking").json()

    assert cli_controls["control_ranking"] == http_controls["control_ranking"]
    assert cli_controls["evaluations"] == http_controls["evaluations"]
    assert cli_ttps["ttp_ranking"] == http_ttps["ttp_ranking"]
    assert cli_ttps["aggregates"] == http_ttps["aggregates"]
    assert [e["ratio_display"] for e in cli_controls["evaluations"]] == [
        "12", "11", "9", "8", "5.3", "2.5", "2.3",
    ]
