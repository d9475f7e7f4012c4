"""Semi-quantitative TTP scoring rubric and multi-assessor aggregation.

Eight criteria, each on a 1..5 anchored scale. Assessors score
independently; aggregation records per-criterion means and ranges, flags
divergence worth a moderation session, and produces a weighted total used
for prioritization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import InputValidationError, ParseError, VersionError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
SCALE_MIN = 1
SCALE_MAX = 5
DEFAULT_DIVERGENCE_THRESHOLD = 3

CONFIDENCE_CRITERION = "graph-confidence"
IMPACT_CRITERIA = ("recovery-time", "restore-cost")


@dataclass(frozen=True)
class CriterionDef:
    """One rubric row: stable id, the question asked, five value anchors."""

    id: str
    question: str
    anchors: tuple[str, str, str, str, str]
    weight: float = 1.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "question": self.question,
            "anchors": list(self.anchors),
            "weight": self.weight,
        }


@dataclass(frozen=True)
class Rubric:
    version: str
    criteria: tuple[CriterionDef, ...]

    def criterion_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria)

    def criterion(self, criterion_id: str) -> CriterionDef | None:
        for c in self.criteria:
            if c.id == criterion_id:
                return c
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "criteria": [c.to_dict() for c in self.criteria],
        }


def default_rubric() -> Rubric:
    """The shipped eight-criterion rubric with its anchored scales."""
    rows: list[tuple[str, str, tuple[str, str, str, str, str]]] = [
        (
            "evidence",
            "Is there evidence of this TTP in a reputable adversary knowledge base?",
            (
                "No evidence of TTP",
                "Scattered information / possible use of TTP",
                "Confirmed evidence of TTP in at least one knowledge base",
                "Confirmed evidence of TTP plus frequent use reported",
                "Confirmed evidence of TTP plus widespread use reported",
            ),
        ),
        (
            "skill-required",
            "What is the level of skill required to apply this TTP?",
            (
                "Advanced skills and specific knowledge on the targeted system",
                "Advanced skills on the targeted asset",
                "Some skills on the targeted asset",
                "General technical skills",
                "No specific skills required",
            ),
        ),
        (
            "applicability",
            "What is this TTP's applicability?",
            (
                "Single asset",
                "Small number of assets system in isolated zone with monitored internet access",
                "Entire ecosystem",
                "A system of systems",
                "A significant portion of IT landscape",
            ),
        ),
        (
            "positioning-effect",
            "What is the positioning effect of this TTP?",
            (
                "General non-segmented, non-monitored network with internet access",
                "General non-segmented network with internet access",
                "General segment with internet access",
                "Isolated zone with internet access",
                "Isolated zone with no internet access",
            ),
        ),
        (
            "recovery-time",
            "How long would it take to recover from this TTP once detected?",
            (
                "<8 hours",
                "8-16 hours",
                "17-37 hours",
                "38-52 hours",
                "> 52 hours",
            ),
        ),
        (
            "restore-cost",
            "What is the estimated cost to restore or replace the impacted asset?",
            (
                "< 10k €",
                "25k €",
                "50k €",
                "75k €",
                "> 100k €",
            ),
        ),
        (
            "detectability",
            "How detectable is this TTP when applied?",
            (
                "TTP obvious without monitoring",
                "Detection likely with routine monitoring",
                "Detection likely with simple refinements of detection methods",
                "Detection possible with newly introduced detection methods",
                "Undetectable",
            ),
        ),
        (
            CONFIDENCE_CRITERION,
            "What is this TTPs confidence level assigned in causal graph?",
            (
                "Extreme uncertainty",
                "Large uncertainty",
                "Certainty",
                "Large certainty",
                "Extreme Certainty",
            ),
        ),
    ]
    return Rubric(
        version="1",
        criteria=tuple(CriterionDef(id=i, question=q, anchors=a) for i, q, a in rows),
    )


def rubric_from_document(document: dict[str, Any]) -> Rubric:
    """Load a rubric from its versioned JSON form."""
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
    version = document.get("version")
    if not isinstance(version, str) or not version:
        raise ParseError("rubric version must be a non-empty string", field="version")
    raw_criteria = document.get("criteria")
    if not isinstance(raw_criteria, list) or not raw_criteria:
        raise ParseError("expected a non-empty list", field="criteria")
    criteria: list[CriterionDef] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_criteria):
        where = f"criteria[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        cid = raw.get("id")
        question = raw.get("question")
        anchors = raw.get("anchors")
        weight = raw.get("weight", 1.0)
        if not isinstance(cid, str) or not cid:
            raise ParseError(f"{where}: expected a non-empty string", field="id")
        if cid in seen:
            raise ParseError(f"{where}: duplicate criterion id {cid!r}", field="id")
        seen.add(cid)
        if not isinstance(question, str) or not question:
            raise ParseError(f"{where}: expected a non-empty string", field="question")
        if not isinstance(anchors, list) or len(anchors) != 5 or any(not isinstance(a, str) for a in anchors):
            raise ParseError(f"{where}: expected exactly five anchor strings", field="anchors")
        if not isinstance(weight, (int, float)) or isinstance(weight, bool) or weight < 0:
            raise ParseError(f"{where}: weight must be non-negative", field="weight")
        criteria.append(CriterionDef(id=cid, question=question, anchors=tuple(anchors), weight=float(weight)))
    return Rubric(version=version, criteria=tuple(criteria))


# ---------------------------------------------------------------------------
# scores
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssessorScore:
    """One assessor's 1..5 values for one TTP, keyed by criterion id."""

    assessor_id: str
    ttp_id: str
    values: Mapping[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "assessor_id": self.assessor_id,
            "ttp_id": self.ttp_id,
            "values": {k: self.values[k] for k in sorted(self.values)},
        }


@dataclass(frozen=True)
class AggregatedScore:
    """Aggregate of all assessor scores for one TTP."""

    ttp_id: str
    assessor_count: int
    means: Mapping[str, float]
    ranges: Mapping[str, int]
    divergence: tuple[str, ...]
    weighted_total: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "ttp_id": self.ttp_id,
            "assessor_count": self.assessor_count,
            "means": {k: self.means[k] for k in sorted(self.means)},
            "ranges": {k: self.ranges[k] for k in sorted(self.ranges)},
            "divergence": list(self.divergence),
            "weighted_total": self.weighted_total,
        }


def validate_score(rubric: Rubric, score: AssessorScore) -> list[str]:
    """Findings for a single submission; an empty list means valid."""
    findings: list[str] = []
    if not score.assessor_id:
        findings.append("assessor_id must be non-empty")
    if not score.ttp_id:
        findings.append("ttp_id must be non-empty")
    wanted = set(rubric.criterion_ids())
    got = set(score.values)
    for missing in sorted(wanted - got):
        findings.append(f"missing value for criterion {missing!r}")
    for unknown in sorted(got - wanted):
        findings.append(f"unknown criterion {unknown!r}")
    for cid in sorted(wanted & got):
        value = score.values[cid]
        if not isinstance(value, int) or isinstance(value, bool) or not SCALE_MIN <= value <= SCALE_MAX:
            findings.append(f"criterion {cid!r} value {value!r} outside {SCALE_MIN}..{SCALE_MAX}")
    return findings


def aggregate(
    rubric: Rubric,
    scores: Iterable[AssessorScore],
    divergence_threshold: int = DEFAULT_DIVERGENCE_THRESHOLD,
) -> AggregatedScore:
    """Combine one TTP's scores across assessors.

    Per criterion: arithmetic mean and range (max minus min). A criterion
    whose range reaches the divergence threshold is flagged for moderation.
    The weighted total sums weight times mean over all criteria.
    """
    rows = list(scores)
    if not rows:
        raise InputValidationError(["aggregate needs at least one score"])
    ttp_ids = {s.ttp_id for s in rows}
    if len(ttp_ids) > 1:
        raise InputValidationError([f"scores mix ttp_ids: {', '.join(sorted(ttp_ids))}"])
    findings: list[str] = []
    for s in rows:
        for finding in validate_score(rubric, s):
            findings.append(f"{s.assessor_id}/{s.ttp_id}: {finding}")
    if findings:
        raise InputValidationError(findings)

    means: dict[str, float] = {}
    ranges: dict[str, int] = {}
    flagged: list[str] = []
    weighted_total = 0.0
    for criterion in rubric.criteria:
        values = [s.values[criterion.id] for s in rows]
        mean = sum(values) / len(values)
        spread = max(values) - min(values)
        means[criterion.id] = mean
        ranges[criterion.id] = spread
        if spread >= divergence_threshold:
            flagged.append(criterion.id)
        weighted_total += criterion.weight * mean
    return AggregatedScore(
        ttp_id=rows[0].ttp_id,
        assessor_count=len({s.assessor_id for s in rows}),
        means=means,
        ranges=ranges,
        divergence=tuple(flagged),
        weighted_total=weighted_total,
    )


def rank_ttps(aggregates: Iterable[AggregatedScore]) -> list[AggregatedScore]:
    """Priority order: highest weighted total first.

    Ties fall back to the graph-confidence mean, then to the ttp id so the
    order is total.
    """
    def sort_key(agg: AggregatedScore):
        confidence = agg.means.get(CONFIDENCE_CRITERION, 0.0)
        return (-agg.weighted_total, -confidence, agg.ttp_id)

    return sorted(aggregates, key=sort_key)


def score_from_dict(raw: dict[str, Any]) -> AssessorScore:
    if not isinstance(raw, dict):
        raise ParseError("expected an object for a score")
    assessor_id = raw.get("assessor_id")
    ttp_id = raw.get("ttp_id")
    values = raw.get("values")
    if not isinstance(assessor_id, str) or not assessor_id:
        raise ParseError("expected a non-empty string", field="assessor_id")
    if not isinstance(ttp_id, str) or not ttp_id:
        raise ParseError("expected a non-empty string", field="ttp_id")
    if not isinstance(values, dict):
        raise ParseError("expected an object of criterion values", field="values")
    return AssessorScore(assessor_id=assessor_id, ttp_id=ttp_id, values=dict(values))


def aggregate_from_dict(raw: dict[str, Any]) -> AggregatedScore:
    return AggregatedScore(
        ttp_id=raw["ttp_id"],
        assessor_count=int(raw["assessor_count"]),
        means={k: float(v) for k, v in raw["means"].items()},
        ranges={k: int(v) for k, v in raw["ranges"].items()},
        divergence=tuple(raw.get("divergence", [])),
        weighted_total=float(raw["weighted_total"]),
    )
