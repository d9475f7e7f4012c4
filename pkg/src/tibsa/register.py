"""Assessment lifecycle orchestration and the persistent risk register.

An assessment snapshots its inputs (knowledge base, intel report,
landscape, rubric), then moves forward-only through
draft -> scored -> evaluated -> reported. The register is a single
versioned JSON file with a content checksum and an append-only audit log.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .canonical import content_hash, pretty_dumps, utc_now
from .effectiveness import (
    ControlEvaluation,
    ControlRecord,
    CoverageMatrix,
    MitigationEntry,
    ScoreMatrix,
    control_benefit,
    control_cost,
    coverage_matrix,
    default_matrix,
    entry_from_dict,
    evaluate_controls,
    parse_level,
    rank_controls,
)
from .errors import (
    ConflictError,
    InputValidationError,
    IntegrityError,
    ParseError,
    StatusError,
    UnknownIdError,
    VersionError,
)
from .graph import (
    CausalGraph,
    CtiReport,
    LandscapeInventory,
    NodeKind,
    ReplanResult,
    TtpClass,
    TtpClassification,
    build_graph,
    classify_ttps,
    cti_from_document,
    enumerate_paths,
    landscape_from_document,
    path_from_dict,
    replan_after_control,
    replan_from_dict,
)
from .kb import KnowledgeBase, ingest_knowledge_base
from .scoring import (
    AggregatedScore,
    AssessorScore,
    Rubric,
    aggregate,
    aggregate_from_dict,
    default_rubric,
    rank_ttps,
    rubric_from_document,
    validate_score,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

MODE_FULL = "full"
MODE_RAPID = "rapid"
MODES = (MODE_FULL, MODE_RAPID)

STATUS_DRAFT = "draft"
STATUS_SCORED = "scored"
STATUS_EVALUATED = "evaluated"
STATUS_REPORTED = "reported"
_STATUS_ORDER = (STATUS_DRAFT, STATUS_SCORED, STATUS_EVALUATED, STATUS_REPORTED)

SOURCE_CTI = "cti_direct"
SOURCE_GOAL = "goal_analysis"

BASELINE_REPLAN_ID = "replan:baseline"


@dataclass(frozen=True)
class ImpactedAsset:
    asset_id: str
    asset_class: str  # possible | probable | plausible
    source: str  # cti_direct | goal_analysis

    def to_dict(self) -> dict[str, str]:
        return {"asset_id": self.asset_id, "class": self.asset_class, "source": self.source}


@dataclass
class Assessment:
    """One campaign assessment with every artifact it produced."""

    id: str
    mode: str
    created_at: str
    updated_at: str
    assume_breach: bool
    probable_threshold: int
    divergence_threshold: int
    max_depth: int
    kb_hash: str
    kb_snapshot: dict[str, Any]
    cti: CtiReport
    landscape: LandscapeInventory
    rubric: Rubric
    adaptation_flags: tuple[str, ...] = ()
    signoff: str = ""
    status: str = STATUS_DRAFT
    impacted_assets: list[ImpactedAsset] = field(default_factory=list)
    classifications: list[TtpClassification] = field(default_factory=list)
    scoped_ttps: list[str] = field(default_factory=list)
    scores: dict[tuple[str, str], AssessorScore] = field(default_factory=dict)
    aggregates: dict[str, AggregatedScore] = field(default_factory=dict)
    ttp_ranking: list[str] = field(default_factory=list)
    controls: list[ControlRecord] = field(default_factory=list)
    mitigations: list[MitigationEntry] = field(default_factory=list)
    evaluations: list[ControlEvaluation] = field(default_factory=list)
    control_ranking: list[str] = field(default_factory=list)
    coverage: CoverageMatrix | None = None
    baseline_path: Any = None
    replans: list[dict[str, Any]] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    report: dict[str, Any] | None = None

    # -- scope ------------------------------------------------------------

    def scoped_classes(self) -> tuple[TtpClass, ...]:
        if self.mode == MODE_RAPID:
            return (TtpClass.PROBABLE,)
        return (TtpClass.PROBABLE, TtpClass.PLAUSIBLE, TtpClass.POSSIBLE_ONLY)

    def compute_scope(self) -> list[str]:
        wanted = self.scoped_classes()
        return sorted(c.ttp_id for c in self.classifications if c.ttp_class in wanted)

    def scoped_mitigations(self) -> list[MitigationEntry]:
        scoped = set(self.scoped_ttps)
        return [e for e in self.mitigations if e.ttp_id in scoped]

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "mode": self.mode,
            "status": self.status,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "assume_breach": self.assume_breach,
            "probable_threshold": self.probable_threshold,
            "divergence_threshold": self.divergence_threshold,
            "max_depth": self.max_depth,
            "kb_hash": self.kb_hash,
            "kb_snapshot": self.kb_snapshot,
            "cti": self.cti.to_dict(),
            "landscape": self.landscape.to_dict(),
            "rubric": self.rubric.to_dict(),
            "rubric_version": self.rubric.version,
            "adaptation_flags": list(self.adaptation_flags),
            "signoff": self.signoff,
            "impacted_assets": [a.to_dict() for a in self.impacted_assets],
            "classifications": [c.to_dict() for c in self.classifications],
            "scoped_ttps": list(self.scoped_ttps),
            "scores": [self.scores[key].to_dict() for key in sorted(self.scores)],
            "aggregates": [self.aggregates[tid].to_dict() for tid in sorted(self.aggregates)],
            "ttp_ranking": list(self.ttp_ranking),
            "controls": [c.to_dict() for c in sorted(self.controls, key=lambda c: c.id)],
            "mitigations": [e.to_dict() for e in sorted(self.mitigations, key=lambda e: e.key())],
            "evaluations": [e.to_dict() for e in sorted(self.evaluations, key=lambda e: e.control_id)],
            "control_ranking": list(self.control_ranking),
            "coverage": self.coverage.to_dict() if self.coverage else None,
            "baseline_path": self.baseline_path.to_dict() if self.baseline_path else None,
            "replans": copy.deepcopy(self.replans),
            "findings": list(self.findings),
            "report": copy.deepcopy(self.report),
        }

    def content_hash(self) -> str:
        doc = self.to_dict()
        doc.pop("created_at")
        doc.pop("updated_at")
        return content_hash(doc)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Assessment) and self.to_dict() == other.to_dict()

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "Assessment":
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise VersionError(f"unsupported schema_version {raw.get('schema_version')!r}")
        assessment = cls(
            id=raw["id"],
            mode=raw["mode"],
            created_at=raw["created_at"],
            updated_at=raw["updated_at"],
            assume_breach=bool(raw["assume_breach"]),
            probable_threshold=int(raw["probable_threshold"]),
            divergence_threshold=int(raw["divergence_threshold"]),
            max_depth=int(raw["max_depth"]),
            kb_hash=raw["kb_hash"],
            kb_snapshot=raw["kb_snapshot"],
            cti=cti_from_document(raw["cti"]),
            landscape=landscape_from_document(raw["landscape"]),
            rubric=rubric_from_document(raw["rubric"]),
            adaptation_flags=tuple(raw.get("adaptation_flags", [])),
            signoff=raw.get("signoff", ""),
            status=raw.get("status", STATUS_DRAFT),
        )
        assessment.impacted_assets = [
            ImpactedAsset(asset_id=r["asset_id"], asset_class=r["class"], source=r["source"])
            for r in raw.get("impacted_assets", [])
        ]
        assessment.classifications = [
            TtpClassification.from_dict(r) for r in raw.get("classifications", [])
        ]
        assessment.scoped_ttps = list(raw.get("scoped_ttps", []))
        for r in raw.get("scores", []):
            score = AssessorScore(
                assessor_id=r["assessor_id"], ttp_id=r["ttp_id"],
                values={k: int(v) for k, v in r["values"].items()},
            )
            assessment.scores[(score.assessor_id, score.ttp_id)] = score
        for r in raw.get("aggregates", []):
            assessment.aggregates[r["ttp_id"]] = aggregate_from_dict(r)
        assessment.ttp_ranking = list(raw.get("ttp_ranking", []))
        for r in raw.get("controls", []):
            cost = r.get("cost", {})
            assessment.controls.append(ControlRecord(
                id=r["id"], name=r.get("name", r["id"]),
                develop_cost=float(cost.get("develop", 0)),
                implement_cost=float(cost.get("implement", 0)),
                maintain_cost=float(cost.get("maintain", 0)),
            ))
        for r in raw.get("mitigations", []):
            assessment.mitigations.append(MitigationEntry(
                control_id=r["control_id"], ttp_id=r["ttp_id"],
                criterion=r["criterion"], level=parse_level(r["level"]),
            ))
        for r in raw.get("evaluations", []):
            assessment.evaluations.append(ControlEvaluation(
                control_id=r["control_id"], benefit=int(r["benefit"]),
                cost=float(r["cost"]), ratio=float(r["ratio"]),
            ))
        assessment.control_ranking = list(raw.get("control_ranking", []))
        if raw.get("coverage"):
            assessment.coverage = CoverageMatrix.from_dict(raw["coverage"])
        assessment.baseline_path = path_from_dict(raw.get("baseline_path"))
        assessment.replans = copy.deepcopy(raw.get("replans", []))
        assessment.findings = list(raw.get("findings", []))
        assessment.report = copy.deepcopy(raw.get("report"))
        return assessment

    # -- helpers -----------------------------------------------------------

    def knowledge_base(self) -> KnowledgeBase:
        return ingest_knowledge_base(self.kb_snapshot)

    def graph(self) -> CausalGraph:
        return build_graph(self.knowledge_base(), self.cti, self.landscape)

    def advance_status(self, target: str) -> None:
        if self._status_index(self.status) < self._status_index(target):
            self.status = target

    def require_status(self, minimum: str) -> None:
        if self._status_index(self.status) < self._status_index(minimum):
            raise StatusError(
                f"assessment {self.id} is {self.status!r}; needs at least {minimum!r}"
            )

    @staticmethod
    def _status_index(status: str) -> int:
        try:
            return _STATUS_ORDER.index(status)
        except ValueError:
            raise StatusError(f"unknown status {status!r}") from None


def set_status(assessment: Assessment, new_status: str) -> None:
    """Explicit transition; moving backward is refused."""
    current = Assessment._status_index(assessment.status)
    wanted = Assessment._status_index(new_status)
    if wanted < current:
        raise StatusError(
            f"cannot move {assessment.id} from {assessment.status!r} back to {new_status!r}"
        )
    assessment.status = new_status


# ---------------------------------------------------------------------------
# lifecycle operations
# ---------------------------------------------------------------------------

def create_assessment(
    mode: str,
    kb: KnowledgeBase,
    cti: CtiReport,
    landscape: LandscapeInventory,
    rubric: Rubric | None = None,
    *,
    assessment_id: str | None = None,
    assume_breach: bool | None = None,
    adaptation_flags: Iterable[str] = (),
    probable_threshold: int = 3,
    divergence_threshold: int = 3,
    max_depth: int = 8,
    now: str | None = None,
) -> Assessment:
    """Snapshot the inputs, draft the impacted-asset list, and classify.

    Assume-breach reasoning is on unless the caller turns it off; rapid mode
    always runs perimeter-first (assume-breach off) and narrows scope to the
    probable risk sphere.
    """
    if mode not in MODES:
        raise InputValidationError([f"mode must be one of {', '.join(MODES)}"])
    if not 1 <= probable_threshold <= 5:
        raise InputValidationError(["probable_threshold must be in 1..5"])
    if not 0 <= divergence_threshold <= 4:
        raise InputValidationError(["divergence_threshold must be in 0..4"])
    if max_depth < 1:
        raise InputValidationError(["max_depth must be >= 1"])
    rubric = rubric or default_rubric()
    if mode == MODE_RAPID:
        assume_breach = False
    elif assume_breach is None:
        assume_breach = True

    graph = build_graph(kb, cti, landscape)  # validates evidence ids, acyclicity
    timestamp = now or utc_now()
    snapshot = kb.to_document()
    snapshot.pop("provenance", None)

    assessment = Assessment(
        id=assessment_id or f"a-{content_hash([kb.snapshot_hash(), cti.to_dict(), landscape.to_dict(), mode])[:12]}",
        mode=mode,
        created_at=timestamp,
        updated_at=timestamp,
        assume_breach=assume_breach,
        probable_threshold=probable_threshold,
        divergence_threshold=divergence_threshold,
        max_depth=max_depth,
        kb_hash=kb.snapshot_hash(),
        kb_snapshot=snapshot,
        cti=cti,
        landscape=landscape,
        rubric=rubric,
        adaptation_flags=tuple(adaptation_flags),
    )
    assessment.classifications = classify_ttps(
        graph, kb, cti, landscape,
        probable_threshold=probable_threshold,
        adaptation_flags=assessment.adaptation_flags,
    )
    assessment.scoped_ttps = assessment.compute_scope()
    assessment.impacted_assets = _derive_impacted_assets(assessment, graph)

    asset_ids = landscape.asset_ids()
    for hint in cti.provided_assets:
        if hint not in asset_ids:
            assessment.findings.append(f"cti names asset {hint!r} not present in the landscape")
    known_ttps = set(kb.techniques)
    for exclusion in landscape.exclusions:
        if exclusion.ttp_id not in known_ttps:
            assessment.findings.append(f"exclusion targets unknown ttp {exclusion.ttp_id!r}")
    return assessment


def _derive_impacted_assets(assessment: Assessment, graph: CausalGraph) -> list[ImpactedAsset]:
    """Assets named by intel plus assets reachable on any path to a goal."""
    landscape = assessment.landscape
    asset_ids = landscape.asset_ids()
    zone_by_id = {a.id: a.zone for a in landscape.assets}

    direct = [aid for aid in assessment.cti.provided_assets if aid in asset_ids]

    reached: set[str] = set()
    for goal_id in graph.goal_ids():
        for path in enumerate_paths(graph, goal_id, max_depth=assessment.max_depth,
                                    landscape=landscape):
            for node_id in path.nodes:
                if graph.nodes[node_id].kind is NodeKind.ASSET:
                    reached.add(node_id)
    if not assessment.assume_breach:
        # Perimeter-first reasoning trusts inner zones; only the exposed
        # surface is drafted from goal analysis.
        reached = {aid for aid in reached if zone_by_id.get(aid) == "internet_facing"}

    out: dict[str, ImpactedAsset] = {}
    for aid in sorted(reached):
        out[aid] = ImpactedAsset(asset_id=aid, asset_class="possible", source=SOURCE_GOAL)
    for aid in sorted(direct):
        out[aid] = ImpactedAsset(asset_id=aid, asset_class="probable", source=SOURCE_CTI)
    return [out[aid] for aid in sorted(out)]


def submit_scores(
    assessment: Assessment,
    scores: Iterable[AssessorScore],
    *,
    now: str | None = None,
) -> list[str]:
    """Record submissions keyed by (assessor, ttp); resubmission replaces.

    Returns the sorted list of scoped TTPs still missing any score.
    """
    rows = list(scores)
    findings: list[str] = []
    known = {c.ttp_id for c in assessment.classifications}
    for score in rows:
        for finding in validate_score(assessment.rubric, score):
            findings.append(f"{score.assessor_id}/{score.ttp_id}: {finding}")
        if score.ttp_id not in known:
            findings.append(f"{score.assessor_id}/{score.ttp_id}: ttp not part of this assessment")
    if findings:
        raise InputValidationError(findings)
    for score in rows:
        assessment.scores[(score.assessor_id, score.ttp_id)] = score
    assessment.updated_at = now or utc_now()
    scored_ttps = {ttp for (_, ttp) in assessment.scores}
    return sorted(set(assessment.scoped_ttps) - scored_ttps)


def attach_controls(
    assessment: Assessment,
    controls: Iterable[ControlRecord],
    mitigations: Iterable[MitigationEntry],
    *,
    now: str | None = None,
) -> None:
    """Replace the control inventory under evaluation."""
    control_rows = list(controls)
    seen: set[str] = set()
    for control in control_rows:
        if control.id in seen:
            raise ConflictError(f"duplicate control id {control.id!r}")
        seen.add(control.id)
        control_cost(control)
    entry_rows = list(mitigations)
    for entry in entry_rows:
        if entry.control_id not in seen:
            raise UnknownIdError(f"mitigation references unknown control {entry.control_id!r}")
    assessment.controls = control_rows
    assessment.mitigations = entry_rows
    assessment.updated_at = now or utc_now()


def run_pipeline(assessment: Assessment, *, now: str | None = None) -> Assessment:
    """Recompute every derived artifact from the stored inputs.

    Classification and scope first, then score aggregation and TTP ranking,
    then control evaluation, coverage, and the adversary baseline. Scores
    must exist for every scoped TTP before the scoring stage proceeds.
    """
    kb = assessment.knowledge_base()
    graph = assessment.graph()
    matrix = default_matrix()

    assessment.classifications = classify_ttps(
        graph, kb, assessment.cti, assessment.landscape,
        probable_threshold=assessment.probable_threshold,
        adaptation_flags=assessment.adaptation_flags,
    )
    assessment.scoped_ttps = assessment.compute_scope()
    assessment.impacted_assets = _derive_impacted_assets(assessment, graph)

    scored_ttps = {ttp for (_, ttp) in assessment.scores}
    missing = sorted(set(assessment.scoped_ttps) - scored_ttps)
    if missing:
        raise InputValidationError(
            [f"no scores submitted for scoped ttp {tid!r}" for tid in missing]
        )

    assessment.aggregates = {}
    for tid in assessment.scoped_ttps:
        ttp_scores = [s for (_, ttp), s in sorted(assessment.scores.items()) if ttp == tid]
        assessment.aggregates[tid] = aggregate(
            assessment.rubric, ttp_scores,
            divergence_threshold=assessment.divergence_threshold,
        )
    ranked = rank_ttps(assessment.aggregates.values())
    assessment.ttp_ranking = [a.ttp_id for a in ranked]
    assessment.advance_status(STATUS_SCORED)

    scoped_entries = assessment.scoped_mitigations()
    assessment.evaluations = evaluate_controls(assessment.controls, scoped_entries, matrix)
    ranked_controls = rank_controls(assessment.evaluations)
    assessment.control_ranking = [e.control_id for e in ranked_controls]
    assessment.coverage = coverage_matrix(
        sorted(assessment.controls, key=lambda c: assessment.control_ranking.index(c.id)),
        scoped_entries,
        assessment.ttp_ranking,
        matrix,
    )

    replan = replan_after_control(
        graph, assessment.classifications, [], scoped_entries,
        landscape=assessment.landscape,
        aggregates=assessment.aggregates,
        max_depth=assessment.max_depth,
        matrix=matrix,
    )
    assessment.baseline_path = replan.new_path
    assessment.replans = [{"id": BASELINE_REPLAN_ID, **replan.to_dict()}]
    assessment.advance_status(STATUS_EVALUATED)
    assessment.updated_at = now or utc_now()
    logger.info(
        "pipeline for %s: %d scoped ttp(s), %d control(s), status %s",
        assessment.id, len(assessment.scoped_ttps), len(assessment.controls), assessment.status,
    )
    return assessment


# ---------------------------------------------------------------------------
# what-if
# ---------------------------------------------------------------------------

def whatif(assessment: Assessment, changes: Iterable[dict[str, Any]]) -> dict[str, Any]:
    """Evaluate staged control changes without touching the assessment.

    Returns fresh evaluations, the re-ranked controls, per-control ratio
    deltas, and the adversary replan with its paradox flag.
    """
    assessment.require_status(STATUS_EVALUATED)
    matrix = default_matrix()
    controls = list(assessment.controls)
    mitigations = list(assessment.mitigations)
    scoped = set(assessment.scoped_ttps)

    def scoped_only(rows: list[MitigationEntry]) -> list[MitigationEntry]:
        return [e for e in rows if e.ttp_id in scoped]

    def benefit_of(control_id: str, rows: list[MitigationEntry]) -> int:
        return control_benefit([e for e in scoped_only(rows) if e.control_id == control_id], matrix)

    before_entries = scoped_only(mitigations)
    applied: list[dict[str, Any]] = []

    for raw in changes:
        if not isinstance(raw, dict):
            raise InputValidationError(["each change must be an object"])
        op = raw.get("op")
        if op == "add_control":
            control_doc = raw.get("control")
            if not isinstance(control_doc, dict):
                raise InputValidationError(["add_control needs a control object"])
            cid = control_doc.get("id")
            if not isinstance(cid, str) or not cid:
                raise InputValidationError(["add_control: control id must be a non-empty string"])
            if any(c.id == cid for c in controls):
                raise ConflictError(f"control {cid!r} already present")
            cost = control_doc.get("cost", {})
            control = ControlRecord(
                id=cid, name=control_doc.get("name", cid),
                develop_cost=float(cost.get("develop", 0)),
                implement_cost=float(cost.get("implement", 0)),
                maintain_cost=float(cost.get("maintain", 0)),
            )
            control_cost(control)
            controls.append(control)
            new_entries = [entry_from_dict(r, cid) for r in control_doc.get("mitigations", [])]
            mitigations.extend(new_entries)
            applied.append({**raw, "control_id": cid, "benefit_delta": benefit_of(cid, mitigations)})
        elif op == "remove_control":
            cid = raw.get("control_id")
            if not any(c.id == cid for c in controls):
                raise UnknownIdError(f"unknown control {cid!r}")
            delta = -benefit_of(cid, mitigations)
            controls = [c for c in controls if c.id != cid]
            mitigations = [e for e in mitigations if e.control_id != cid]
            applied.append({**raw, "benefit_delta": delta})
        elif op == "change_level":
            cid = raw.get("control_id")
            ttp_id = raw.get("ttp_id")
            criterion = str(raw.get("criterion", "")).strip().upper()
            new_level = parse_level(raw.get("new_level", ""))
            wanted = matrix.by_name(criterion).name
            target = next(
                (e for e in mitigations
                 if e.control_id == cid and e.ttp_id == ttp_id and e.criterion == wanted),
                None,
            )
            if target is None:
                raise UnknownIdError(
                    f"no mitigation of {ttp_id!r} along {wanted!r} for control {cid!r}"
                )
            old = benefit_of(cid, mitigations)
            mitigations = [e for e in mitigations if e is not target]
            mitigations.append(MitigationEntry(
                control_id=cid, ttp_id=ttp_id, criterion=wanted, level=new_level,
            ))
            applied.append({**raw, "benefit_delta": benefit_of(cid, mitigations) - old})
        else:
            raise InputValidationError([f"unknown what-if op {op!r}"])

    after_entries = scoped_only(mitigations)
    evaluations = evaluate_controls(controls, after_entries, matrix)
    ranking = [e.control_id for e in rank_controls(evaluations)]

    old_ratio = {e.control_id: e.ratio for e in assessment.evaluations}
    new_ratio = {e.control_id: e.ratio for e in evaluations}
    ratio_deltas: dict[str, float | None] = {}
    for cid in sorted(set(old_ratio) | set(new_ratio)):
        if cid in old_ratio and cid in new_ratio:
            ratio_deltas[cid] = new_ratio[cid] - old_ratio[cid]
        else:
            ratio_deltas[cid] = None

    graph = assessment.graph()
    replan = replan_after_control(
        graph, assessment.classifications, before_entries, after_entries,
        landscape=assessment.landscape,
        aggregates=assessment.aggregates,
        max_depth=assessment.max_depth,
        matrix=matrix,
    )
    return {
        "assessment_id": assessment.id,
        "changes": applied,
        "evaluations": [e.to_dict() for e in evaluations],
        "control_ranking": ranking,
        "ratio_deltas": ratio_deltas,
        "replan": replan.to_dict(),
        "paradox": replan.paradox,
        "content_hash": assessment.content_hash(),
    }


# ---------------------------------------------------------------------------
# the register
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditEntry:
    who: str
    what: str
    when: str

    def to_dict(self) -> dict[str, str]:
        return {"who": self.who, "what": self.what, "when": self.when}


class RiskRegister:
    """All assessments plus the append-only audit trail."""

    def __init__(self) -> None:
        self.assessments: dict[str, Assessment] = {}
        self.audit_log: list[AuditEntry] = []

    def put(self, assessment: Assessment, who: str, what: str | None = None,
            *, now: str | None = None) -> None:
        action = what or f"stored assessment {assessment.id} ({assessment.status})"
        self.assessments[assessment.id] = assessment
        self.audit_log.append(AuditEntry(who=who, what=action, when=now or utc_now()))

    def get(self, assessment_id: str) -> Assessment:
        assessment = self.assessments.get(assessment_id)
        if assessment is None:
            raise UnknownIdError(f"unknown assessment {assessment_id!r}")
        return assessment

    def to_document(self) -> dict[str, Any]:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "assessments": {
                aid: self.assessments[aid].to_dict() for aid in sorted(self.assessments)
            },
            "audit_log": [entry.to_dict() for entry in self.audit_log],
        }
        return {**payload, "checksum": content_hash(payload)}

    @classmethod
    def from_document(cls, document: dict[str, Any]) -> "RiskRegister":
        if not isinstance(document, dict):
            raise ParseError("register document must be an object")
        version = document.get("schema_version")
        if version != SCHEMA_VERSION:
            raise VersionError(f"unsupported register schema_version {version!r}")
        recorded = document.get("checksum")
        payload = {k: v for k, v in document.items() if k != "checksum"}
        if recorded != content_hash(payload):
            raise IntegrityError("register checksum mismatch; file is corrupt or was edited")
        register = cls()
        for aid, raw in document.get("assessments", {}).items():
            assessment = Assessment.from_dict(raw)
            if assessment.id != aid:
                raise IntegrityError(f"assessment key {aid!r} does not match id {assessment.id!r}")
            register.assessments[aid] = assessment
        for raw in document.get("audit_log", []):
            register.audit_log.append(AuditEntry(
                who=raw.get("who", ""), what=raw.get("what", ""), when=raw.get("when", ""),
            ))
        return register

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RiskRegister) and self.to_document() == other.to_document()


def save_register(register: RiskRegister, destination: str | Path) -> None:
    Path(destination).write_text(pretty_dumps(register.to_document()), encoding="utf-8")


def load_register(source: str | Path) -> RiskRegister:
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"register file is not valid JSON: {exc.msg}") from exc
    return RiskRegister.from_document(document)


def load_or_create_register(source: str | Path) -> RiskRegister:
    path = Path(source)
    if path.exists():
        return load_register(path)
    return RiskRegister()
