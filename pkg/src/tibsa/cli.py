"""Command-line gateway to the assessment engine.

Exit codes: 0 on success, 1 on any validation or domain error, 2 on I/O
failures. Results print as JSON unless --format asks for a table or CSV.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any

import click

from . import effectiveness, figures, kb as kb_mod, report as report_mod
from .canonical import pretty_dumps
from .config import GatewayConfig, config_from_env
from .errors import EngineError, ParseError
from .graph import build_graph, classify_ttps, cti_from_document, landscape_from_document
from .register import (
    Assessment,
    RiskRegister,
    create_assessment,
    load_or_create_register,
    run_pipeline,
    save_register,
    submit_scores,
    attach_controls,
    whatif as whatif_op,
)
from .scoring import (
    aggregate,
    default_rubric,
    rank_ttps,
    rubric_from_document,
    score_from_dict,
)

logger = logging.getLogger(__name__)

_FORMATS = ("json", "table", "csv")


# ---------------------------------------------------------------------------
# small I/O helpers
# ---------------------------------------------------------------------------

def _read_json(path: str) -> dict[str, Any]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        parsed = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(parsed, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    return parsed


def _load_kb_file(path: str) -> kb_mod.KnowledgeBase:
    document = _read_json(path)
    kind = document.get("kind")
    if kind == "knowledge_base":
        return kb_mod.ingest_knowledge_base(document)
    if kind in kb_mod.CATALOG_KINDS:
        return kb_mod.ingest_catalog(document, kind, source=path)
    if document.get("type") == "bundle":
        return kb_mod.ingest_catalog(document, "stix", source=path)
    raise ParseError(f"{path}: unrecognized document kind {kind!r}", field="kind")


def _echo_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _echo_table(headers: list[str], rows: list[list[Any]]) -> None:
    cells = [headers] + [[str(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    for i, row in enumerate(cells):
        click.echo("  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip())
        if i == 0:
            click.echo("  ".join("-" * width for width in widths))


def _echo_csv(headers: list[str], rows: list[list[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    click.echo(buffer.getvalue(), nl=False)


def _emit(fmt: str, headers: list[str], rows: list[list[Any]], json_payload: Any) -> None:
    if fmt == "table":
        _echo_table(headers, rows)
    elif fmt == "csv":
        _echo_csv(headers, rows)
    else:
        _echo_json(json_payload)


def _register_path(option_value: str | None, config: GatewayConfig) -> str:
    return option_value or config.register_path


def _load_register(path: str) -> RiskRegister:
    return load_or_create_register(path)


def _load_rubric(path: str | None, config: GatewayConfig):
    source = path or config.rubric_path
    if source is None:
        return default_rubric()
    return rubric_from_document(_read_json(source))


def _load_matrix(path: str | None, config: GatewayConfig):
    source = path or config.matrix_path
    if source is None:
        return effectiveness.default_matrix()
    return effectiveness.matrix_from_document(_read_json(source))


# ---------------------------------------------------------------------------
# command tree
# ---------------------------------------------------------------------------

@click.group()
def cli() -> None:
    """Threat-intelligence based security assessment toolkit."""


@cli.command("ingest")
@click.argument("files", nargs=-1, required=True, type=click.Path())
@click.option("--kind", default=None,
              type=click.Choice([*kb_mod.CATALOG_KINDS, "stix"]),
              help="Expected catalog kind; defaults to each file's own kind field.")
@click.option("--out", default=None, type=click.Path(), help="Write the merged knowledge base here.")
def ingest_cmd(files: tuple[str, ...], kind: str | None, out: str | None) -> None:
    """Parse catalog files and merge them into one knowledge base."""
    merged = kb_mod.KnowledgeBase()
    for path in files:
        if kind is None:
            kb = _load_kb_file(path)
        else:
            kb = kb_mod.ingest_catalog(_read_json(path), kind, source=path)
        merged = kb_mod.merge_catalogs(merged, kb)
    validation = kb_mod.validate_catalog(merged)
    if out:
        Path(out).write_text(pretty_dumps(merged.to_document()), encoding="utf-8")
    _echo_json({
        "counts": {k: len(merged.bucket(k)) for k in kb_mod.CATALOG_KINDS},
        "kb_hash": merged.snapshot_hash(),
        "validation": validation.to_dict(),
        "written": out,
    })


@cli.group("graph")
def graph_group() -> None:
    """Build or export causal attack graphs."""


@graph_group.command("build")
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--cti", "cti_path", required=True, type=click.Path())
@click.option("--landscape", "landscape_path", required=True, type=click.Path())
@click.option("--out", default=None, type=click.Path())
def graph_build_cmd(kb_path: str, cti_path: str, landscape_path: str, out: str | None) -> None:
    """Build the graph from a knowledge base, CTI report, and landscape."""
    kb = _load_kb_file(kb_path)
    cti = cti_from_document(_read_json(cti_path))
    landscape = landscape_from_document(_read_json(landscape_path))
    graph = build_graph(kb, cti, landscape)
    document = graph.to_node_link()
    if out:
        Path(out).write_text(pretty_dumps(document), encoding="utf-8")
    _echo_json(document)


@graph_group.command("export")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--register", "register_path", default=None, type=click.Path())
def graph_export_cmd(assessment_id: str, register_path: str | None) -> None:
    """Export a stored assessment's graph as node-link JSON."""
    config = config_from_env()
    register = _load_register(_register_path(register_path, config))
    assessment = register.get(assessment_id)
    _echo_json(assessment.graph().to_node_link())


@cli.command("classify")
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--cti", "cti_path", required=True, type=click.Path())
@click.option("--landscape", "landscape_path", required=True, type=click.Path())
@click.option("--probable-threshold", default=None, type=int)
@click.option("--format", "fmt", default="json", type=click.Choice(_FORMATS))
def classify_cmd(kb_path: str, cti_path: str, landscape_path: str,
                 probable_threshold: int | None, fmt: str) -> None:
    """Triage every evidenced TTP into its class and sphere."""
    config = config_from_env()
    threshold = probable_threshold if probable_threshold is not None else config.probable_threshold
    kb = _load_kb_file(kb_path)
    cti = cti_from_document(_read_json(cti_path))
    landscape = landscape_from_document(_read_json(landscape_path))
    graph = build_graph(kb, cti, landscape)
    classifications = classify_ttps(graph, kb, cti, landscape, probable_threshold=threshold)
    rows = [[c.ttp_id, c.ttp_class.value, c.sphere.value, "; ".join(c.rationale)]
            for c in classifications]
    _emit(fmt, ["ttp_id", "class", "sphere", "rationale"], rows,
          {"classifications": [c.to_dict() for c in classifications]})


@cli.command("create")
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--cti", "cti_path", required=True, type=click.Path())
@click.option("--landscape", "landscape_path", required=True, type=click.Path())
@click.option("--mode", default=None, type=click.Choice(["full", "rapid"]))
@click.option("--rubric", "rubric_path", default=None, type=click.Path())
@click.option("--controls", "controls_path", default=None, type=click.Path())
@click.option("--id", "assessment_id", default=None)
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--who", default="cli")
def create_cmd(kb_path: str, cti_path: str, landscape_path: str, mode: str | None,
               rubric_path: str | None, controls_path: str | None,
               assessment_id: str | None, register_path: str | None, who: str) -> None:
    """Create a draft assessment in the register."""
    config = config_from_env()
    kb = _load_kb_file(kb_path)
    cti = cti_from_document(_read_json(cti_path))
    landscape = landscape_from_document(_read_json(landscape_path))
    assessment = create_assessment(
        mode or config.default_mode, kb, cti, landscape,
        _load_rubric(rubric_path, config),
        assessment_id=assessment_id,
        probable_threshold=config.probable_threshold,
        divergence_threshold=config.divergence_threshold,
        max_depth=config.max_depth,
    )
    if controls_path:
        controls, entries = effectiveness.parse_control_inventory(_read_json(controls_path))
        attach_controls(assessment, controls, entries)
    destination = _register_path(register_path, config)
    register = _load_register(destination)
    if assessment.id in register.assessments:
        raise EngineError(f"assessment {assessment.id!r} already exists in the register")
    register.put(assessment, who=who, what=f"created assessment {assessment.id}")
    save_register(register, destination)
    _echo_json({
        "id": assessment.id,
        "status": assessment.status,
        "mode": assessment.mode,
        "scoped_ttps": assessment.scoped_ttps,
        "content_hash": assessment.content_hash(),
    })


@cli.group("score")
def score_group() -> None:
    """Submit or aggregate assessor scores."""


@score_group.command("submit")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--scores", "scores_path", required=True, type=click.Path())
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--who", default="cli")
def score_submit_cmd(assessment_id: str, scores_path: str,
                     register_path: str | None, who: str) -> None:
    """Record assessor scores; resubmitting a (assessor, ttp) pair replaces it."""
    config = config_from_env()
    document = _read_json(scores_path)
    scores = [score_from_dict(raw) for raw in document.get("scores", [])]
    destination = _register_path(register_path, config)
    register = _load_register(destination)
    assessment = register.get(assessment_id)
    missing = submit_scores(assessment, scores)
    register.put(assessment, who=who, what=f"submitted {len(scores)} score(s) for {assessment.id}")
    save_register(register, destination)
    _echo_json({
        "accepted": len(scores),
        "missing_scoped_ttps": missing,
        "content_hash": assessment.content_hash(),
    })


@score_group.command("aggregate")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--format", "fmt", default="json", type=click.Choice(_FORMATS))
def score_aggregate_cmd(assessment_id: str, register_path: str | None, fmt: str) -> None:
    """Aggregate the stored scores per scoped TTP (read-only)."""
    config = config_from_env()
    register = _load_register(_register_path(register_path, config))
    assessment = register.get(assessment_id)
    aggregates = []
    for tid in assessment.scoped_ttps:
        ttp_scores = [s for (_, ttp), s in sorted(assessment.scores.items()) if ttp == tid]
        if ttp_scores:
            aggregates.append(aggregate(assessment.rubric, ttp_scores,
                                        divergence_threshold=assessment.divergence_threshold))
    ranked = rank_ttps(aggregates)
    rows = [[a.ttp_id, f"{a.weighted_total:g}", a.assessor_count, ",".join(a.divergence)]
            for a in ranked]
    _emit(fmt, ["ttp_id", "weighted_total", "assessors", "divergence"], rows,
          {"aggregates": [a.to_dict() for a in ranked]})


def _evaluation_rows(assessment_or_none: Assessment | None,
                     evaluations: list[effectiveness.ControlEvaluation],
                     ranking: list[str]) -> list[list[Any]]:
    by_id = {e.control_id: e for e in evaluations}
    rows = []
    for cid in ranking:
        evaluation = by_id[cid]
        rows.append([
            evaluation.control_id,
            evaluation.benefit,
            f"{evaluation.cost:g}",
            effectiveness.format_ratio(evaluation.ratio),
        ])
    return rows


@cli.command("evaluate")
@click.option("--controls", "controls_path", required=True, type=click.Path())
@click.option("--assessment", "assessment_id", default=None)
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--matrix", "matrix_path", default=None, type=click.Path())
@click.option("--who", default="cli")
@click.option("--format", "fmt", default="json", type=click.Choice(_FORMATS))
def evaluate_cmd(controls_path: str, assessment_id: str | None, register_path: str | None,
                 matrix_path: str | None, who: str, fmt: str) -> None:
    """Attach a control inventory and compute benefit, cost, and ranking.

    With --assessment the full pipeline runs against the stored assessment
    and persists; without it the controls are evaluated standalone.
    """
    config = config_from_env()
    if assessment_id is None:
        matrix = _load_matrix(matrix_path, config)
        controls, entries = effectiveness.parse_control_inventory(_read_json(controls_path), matrix)
        evaluations = effectiveness.evaluate_controls(controls, entries, matrix)
        ranked = effectiveness.rank_controls(evaluations)
        ranking = [e.control_id for e in ranked]
        _emit(fmt, ["control_id", "benefit", "cost", "ratio"],
              _evaluation_rows(None, evaluations, ranking),
              {"evaluations": [e.to_dict() for e in ranked], "control_ranking": ranking})
        return
    controls, entries = effectiveness.parse_control_inventory(_read_json(controls_path))
    destination = _register_path(register_path, config)
    register = _load_register(destination)
    assessment = register.get(assessment_id)
    attach_controls(assessment, controls, entries)
    run_pipeline(assessment)
    register.put(assessment, who=who, what=f"evaluated {len(controls)} control(s) for {assessment.id}")
    save_register(register, destination)
    _emit(fmt, ["control_id", "benefit", "cost", "ratio"],
          _evaluation_rows(assessment, assessment.evaluations, assessment.control_ranking),
          {
              "evaluations": [e.to_dict() for e in assessment.evaluations],
              "control_ranking": assessment.control_ranking,
              "status": assessment.status,
              "content_hash": assessment.content_hash(),
          })


@cli.command("rank")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--kind", default="ttps", type=click.Choice(["ttps", "controls"]))
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--format", "fmt", default="json", type=click.Choice(_FORMATS))
def rank_cmd(assessment_id: str, kind: str, register_path: str | None, fmt: str) -> None:
    """Print the stored TTP or control ranking."""
    config = config_from_env()
    register = _load_register(_register_path(register_path, config))
    assessment = register.get(assessment_id)
    assessment.require_status("evaluated")
    if kind == "ttps":
        rows = [[tid, f"{assessment.aggregates[tid].weighted_total:g}"]
                for tid in assessment.ttp_ranking]
        _emit(fmt, ["ttp_id", "weighted_total"], rows,
              {"ttp_ranking": assessment.ttp_ranking,
               "aggregates": [assessment.aggregates[t].to_dict() for t in assessment.ttp_ranking]})
    else:
        _emit(fmt, ["control_id", "benefit", "cost", "ratio"],
              _evaluation_rows(assessment, assessment.evaluations, assessment.control_ranking),
              {"control_ranking": assessment.control_ranking,
               "evaluations": [e.to_dict() for e in assessment.evaluations]})


@cli.command("whatif")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--changes", "changes_path", required=True, type=click.Path())
@click.option("--register", "register_path", default=None, type=click.Path())
def whatif_cmd(assessment_id: str, changes_path: str, register_path: str | None) -> None:
    """Evaluate staged control changes without persisting anything."""
    config = config_from_env()
    register = _load_register(_register_path(register_path, config))
    assessment = register.get(assessment_id)
    document = _read_json(changes_path)
    result = whatif_op(assessment, document.get("changes", []))
    _echo_json(result)


@cli.command("report")
@click.option("--assessment", "assessment_id", required=True)
@click.option("--register", "register_path", default=None, type=click.Path())
@click.option("--out", "out_dir", default=None, type=click.Path())
@click.option("--who", default="cli")
def report_cmd(assessment_id: str, register_path: str | None,
               out_dir: str | None, who: str) -> None:
    """Generate the five-section report; optionally write the document set.

    The output directory receives the structured report, its human-readable
    rendering, the ranking and coverage CSVs, and rendered figures.
    """
    config = config_from_env()
    destination = _register_path(register_path, config)
    register = _load_register(destination)
    assessment = register.get(assessment_id)
    report = report_mod.generate_report(assessment)
    register.put(assessment, who=who, what=f"reported assessment {assessment.id}")
    save_register(register, destination)
    if out_dir:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "report.json").write_text(pretty_dumps(report.to_dict()), encoding="utf-8")
        (directory / "report.md").write_text(
            report_mod.render_report_markdown(report, assessment), encoding="utf-8")
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["control_id", "benefit", "cost", "ratio"])
        writer.writerows(_evaluation_rows(assessment, assessment.evaluations,
                                          assessment.control_ranking))
        (directory / "controls.csv").write_text(buffer.getvalue(), encoding="utf-8")
        if assessment.coverage:
            (directory / "coverage.csv").write_text(
                effectiveness.render_matrix_csv(assessment.coverage), encoding="utf-8")
        figures.render_report_figures(assessment, directory / "figures")
    _echo_json({"report": report.to_dict(), "content_hash": assessment.content_hash(),
                "written": out_dir})


@cli.command("serve")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--register", "register_path", default=None, type=click.Path())
def serve_cmd(host: str | None, port: int | None, register_path: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = config_from_env()
    if host or port or register_path:
        from dataclasses import replace
        config = replace(
            config,
            host=host or config.host,
            port=port or config.port,
            register_path=register_path or config.register_path,
        )
    config.validate()
    uvicorn.run(create_app(config), host=config.host, port=config.port)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cli.main(args=argv, prog_name="tibsa", standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 1
    except EngineError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
