"""Assessment report assembly and rendering.

A report always carries five sections: consolidated inputs, control
effectiveness against the campaign goals, stakeholder recommendations,
the effectiveness rationale with assessor attestation, and the
strategy-shift impact analysis. Every recommendation cites the evaluation
or replan result it rests on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .canonical import utc_now
from .effectiveness import EffectivenessLevel, format_ratio, upgrade_effect
from .errors import StatusError
from .register import (
    Assessment,
    BASELINE_REPLAN_ID,
    STATUS_EVALUATED,
    STATUS_REPORTED,
    set_status,
)

logger = logging.getLogger(__name__)

SECTION_KEYS = (
    "inputs",
    "control_effectiveness",
    "recommendations",
    "rationale",
    "strategy_impact",
)

_SECTION_TITLES = {
    "inputs": "Consolidated inputs",
    "control_effectiveness": "Control effectiveness against campaign goals",
    "recommendations": "Stakeholder recommendations",
    "rationale": "Effectiveness rationale and attestation",
    "strategy_impact": "Adversary strategy-shift impact",
}


@dataclass(frozen=True)
class Recommendation:
    id: str
    text: str
    refs: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "text": self.text, "refs": list(self.refs)}


@dataclass
class Report:
    assessment_id: str
    generated_at: str
    sections: list[dict[str, Any]] = field(default_factory=list)

    def section(self, key: str) -> dict[str, Any]:
        for section in self.sections:
            if section["key"] == key:
                return section
        raise KeyError(key)

    @property
    def recommendations(self) -> list[dict[str, Any]]:
        return self.section("recommendations")["content"]["recommendations"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "assessment_id": self.assessment_id,
            "generated_at": self.generated_at,
            "sections": self.sections,
        }


def _attestation(assessment: Assessment) -> list[dict[str, Any]]:
    """Per control: which assessors backed the scores behind its evaluation."""
    scoped = set(assessment.scoped_ttps)
    out = []
    for control in sorted(assessment.controls, key=lambda c: c.id):
        mitigated = {
            e.ttp_id for e in assessment.mitigations
            if e.control_id == control.id and e.ttp_id in scoped
        }
        assessors = sorted({
            assessor for (assessor, ttp) in assessment.scores if ttp in mitigated
        })
        out.append({
            "control_id": control.id,
            "mitigated_ttps": sorted(mitigated),
            "assessors": assessors,
            "attested": len(assessors) >= 2,
        })
    return out


def _upgrade_opportunities(assessment: Assessment) -> list[dict[str, Any]]:
    """Ratio gains from raising any below-high mitigation to high."""
    cost_by_id = {}
    for control in assessment.controls:
        cost_by_id[control.id] = (
            control.develop_cost + control.implement_cost + control.maintain_cost
        )
    ratio_by_id = {e.control_id: e.ratio for e in assessment.evaluations}
    scoped = set(assessment.scoped_ttps)
    opportunities = []
    for entry in sorted(assessment.mitigations, key=lambda e: e.key()):
        if entry.level is EffectivenessLevel.HIGH or entry.ttp_id not in scoped:
            continue
        effect = upgrade_effect(
            assessment.scoped_mitigations(),
            entry.control_id, entry.ttp_id, entry.criterion,
            EffectivenessLevel.HIGH, cost_by_id[entry.control_id],
        )
        opportunities.append({
            "control_id": entry.control_id,
            "ttp_id": entry.ttp_id,
            "criterion": entry.criterion,
            "from_level": entry.level.value,
            "benefit_delta": effect.benefit_delta,
            "ratio_delta": effect.new_ratio - ratio_by_id.get(entry.control_id, 0.0),
        })
    opportunities.sort(key=lambda o: (-o["ratio_delta"], o["control_id"], o["ttp_id"]))
    return opportunities


def _build_recommendations(assessment: Assessment,
                           opportunities: list[dict[str, Any]]) -> list[Recommendation]:
    recommendations: list[Recommendation] = []
    evaluation_by_id = {e.control_id: e for e in assessment.evaluations}

    if assessment.control_ranking:
        top = assessment.control_ranking[0]
        evaluation = evaluation_by_id[top]
        recommendations.append(Recommendation(
            id="rec-1",
            text=(
                f"Prioritize control {top}: best benefit-to-cost ratio "
                f"({format_ratio(evaluation.ratio)}) across the scoped TTP set."
            ),
            refs=(top,),
        ))
    for opportunity in opportunities[:3]:
        recommendations.append(Recommendation(
            id=f"rec-{len(recommendations) + 1}",
            text=(
                f"Raise {opportunity['control_id']} against {opportunity['ttp_id']} "
                f"({opportunity['criterion']}) from {opportunity['from_level']} to high: "
                f"benefit +{opportunity['benefit_delta']}."
            ),
            refs=(opportunity["control_id"],),
        ))
    baseline = next((r for r in assessment.replans if r.get("id") == BASELINE_REPLAN_ID), None)
    if baseline is not None and baseline.get("paradox"):
        recommendations.append(Recommendation(
            id=f"rec-{len(recommendations) + 1}",
            text=(
                "The in-place controls push the adversary onto a less detectable or "
                "higher-impact path; review detection coverage on the alternate route."
            ),
            refs=(BASELINE_REPLAN_ID,),
        ))
    covered = {e.ttp_id for e in assessment.scoped_mitigations()}
    gaps = [tid for tid in assessment.ttp_ranking if tid not in covered]
    if gaps and baseline is not None:
        listed = ", ".join(gaps[:5])
        recommendations.append(Recommendation(
            id=f"rec-{len(recommendations) + 1}",
            text=f"No in-place control mitigates: {listed}. Close these before re-assessing.",
            refs=(BASELINE_REPLAN_ID,),
        ))
    return recommendations


def generate_report(assessment: Assessment, *, now: str | None = None) -> Report:
    """Assemble the five-section report and move the assessment forward.

    The assessment must already be evaluated; regenerating from a reported
    assessment is allowed and replaces the stored report.
    """
    if assessment.status not in (STATUS_EVALUATED, STATUS_REPORTED):
        raise StatusError(
            f"assessment {assessment.id} is {assessment.status!r}; report needs 'evaluated'"
        )
    class_counts: dict[str, int] = {}
    for classification in assessment.classifications:
        key = classification.ttp_class.value
        class_counts[key] = class_counts.get(key, 0) + 1

    report = Report(assessment_id=assessment.id, generated_at=now or utc_now())

    report.sections.append({
        "key": "inputs",
        "title": _SECTION_TITLES["inputs"],
        "content": {
            "campaign_id": assessment.cti.campaign_id,
            "actor": assessment.cti.actor,
            "goals": list(assessment.cti.goals),
            "mode": assessment.mode,
            "assume_breach": assessment.assume_breach,
            "kb_hash": assessment.kb_hash,
            "rubric_version": assessment.rubric.version,
            "asset_count": len(assessment.landscape.assets),
            "impacted_assets": [a.to_dict() for a in assessment.impacted_assets],
            "classification_counts": class_counts,
            "scoped_ttps": list(assessment.scoped_ttps),
            "note": (
                "Path propensity is a confidence-sum proxy over graph edges, "
                "not a calibrated likelihood."
            ),
        },
    })

    covered = {e.ttp_id for e in assessment.scoped_mitigations()}
    report.sections.append({
        "key": "control_effectiveness",
        "title": _SECTION_TITLES["control_effectiveness"],
        "content": {
            "goals": list(assessment.cti.goals),
            "evaluations": [
                next(e for e in assessment.evaluations if e.control_id == cid).to_dict()
                for cid in assessment.control_ranking
            ],
            "coverage": assessment.coverage.to_dict() if assessment.coverage else None,
            "uncovered_ttps": [t for t in assessment.ttp_ranking if t not in covered],
            "ttp_ranking": list(assessment.ttp_ranking),
        },
    })

    opportunities = _upgrade_opportunities(assessment)
    recommendations = _build_recommendations(assessment, opportunities)
    report.sections.append({
        "key": "recommendations",
        "title": _SECTION_TITLES["recommendations"],
        "content": {"recommendations": [r.to_dict() for r in recommendations]},
    })

    report.sections.append({
        "key": "rationale",
        "title": _SECTION_TITLES["rationale"],
        "content": {
            "divergent_criteria": {
                tid: list(assessment.aggregates[tid].divergence)
                for tid in sorted(assessment.aggregates)
                if assessment.aggregates[tid].divergence
            },
            "attestation": _attestation(assessment),
            "signoff": assessment.signoff,
        },
    })

    report.sections.append({
        "key": "strategy_impact",
        "title": _SECTION_TITLES["strategy_impact"],
        "content": {
            "baseline_path": assessment.baseline_path.to_dict() if assessment.baseline_path else None,
            "replans": list(assessment.replans),
            "upgrade_opportunities": opportunities,
        },
    })

    assessment.report = report.to_dict()
    set_status(assessment, STATUS_REPORTED)
    logger.info("report generated for %s (%d recommendations)",
                assessment.id, len(recommendations))
    return report


def render_report_markdown(report: Report, assessment: Assessment) -> str:
    """Human-readable rendering of the structured report."""
    lines: list[str] = [
        f"# Assessment report: {assessment.cti.campaign_id}",
        "",
        f"- Assessment: `{report.assessment_id}`",
        f"- Generated: {report.generated_at}",
        f"- Mode: {assessment.mode}",
        f"- Status: {assessment.status}",
        "",
    ]
    for section in report.sections:
        lines.append(f"## {section['title']}")
        lines.append("")
        key = section["key"]
        content = section["content"]
        if key == "inputs":
            lines.append(f"- Campaign: {content['campaign_id']} ({content['actor'] or 'unattributed'})")
            lines.append(f"- Goals: {'; '.join(content['goals'])}")
            lines.append(f"- Assume breach: {'yes' if content['assume_breach'] else 'no'}")
            lines.append(f"- Knowledge base: `{content['kb_hash'][:12]}`")
            counts = ", ".join(f"{k}={v}" for k, v in sorted(content["classification_counts"].items()))
            lines.append(f"- Classification counts: {counts or 'none'}")
            lines.append(f"- Scoped TTPs: {', '.join(content['scoped_ttps']) or 'none'}")
            impacted = ", ".join(
                f"{a['asset_id']} ({a['class']}, {a['source']})" for a in content["impacted_assets"]
            )
            lines.append(f"- Impacted assets: {impacted or 'none identified'}")
            lines.append(f"- Note: {content['note']}")
        elif key == "control_effectiveness":
            if content["evaluations"]:
                lines.append("| control | benefit | cost | B/C |")
                lines.append("| --- | ---: | ---: | ---: |")
                for evaluation in content["evaluations"]:
                    lines.append(
                        f"| {evaluation['control_id']} | {evaluation['benefit']} "
                        f"| {evaluation['cost']:g} | {evaluation['ratio_display']} |"
                    )
            else:
                lines.append("No controls were evaluated.")
            if content["uncovered_ttps"]:
                lines.append("")
                lines.append(f"Uncovered scoped TTPs: {', '.join(content['uncovered_ttps'])}")
        elif key == "recommendations":
            for rec in content["recommendations"]:
                refs = ", ".join(rec["refs"])
                lines.append(f"1. {rec['text']} _(basis: {refs})_")
            if not content["recommendations"]:
                lines.append("No recommendations were produced.")
        elif key == "rationale":
            for row in content["attestation"]:
                mark = "attested" if row["attested"] else "single-assessor"
                assessors = ", ".join(row["assessors"]) or "nobody"
                lines.append(
                    f"- {row['control_id']}: scored by {assessors} ({mark})"
                )
            if content["divergent_criteria"]:
                lines.append("")
                for tid, criteria in content["divergent_criteria"].items():
                    lines.append(f"- Divergence on {tid}: {', '.join(criteria)}")
            if content["signoff"]:
                lines.append("")
                lines.append(f"Sign-off: {content['signoff']}")
        elif key == "strategy_impact":
            baseline = content["baseline_path"]
            if baseline:
                lines.append(
                    f"- Adversary baseline path: {' > '.join(baseline['nodes'])} "
                    f"(propensity {baseline['propensity']:g}, "
                    f"detect coverage {baseline['detect_coverage']:g})"
                )
            else:
                lines.append("- No viable adversary path under the in-place controls.")
            for replan in content["replans"]:
                flag = "paradox" if replan.get("paradox") else "no paradox"
                lines.append(f"- Replan {replan.get('id')}: {flag}")
            if content["upgrade_opportunities"]:
                lines.append("")
                lines.append("Upgrade opportunities:")
                for opportunity in content["upgrade_opportunities"][:5]:
                    lines.append(
                        f"- {opportunity['control_id']} vs {opportunity['ttp_id']} "
                        f"({opportunity['criterion']} {opportunity['from_level']} to high): "
                        f"benefit +{opportunity['benefit_delta']}"
                    )
        lines.append("")
    return "\n".join(lines)
