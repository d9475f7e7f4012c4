"""HTTP gateway exposing the assessment engine.

Thin JSON layer over the register operations: every handler parses input,
calls the same engine functions the CLI uses, persists the register when it
mutated, and maps domain errors onto status codes (400 invalid input,
404 unknown id, 409 conflict or status violation, 422 schema version).
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import effectiveness
from .config import GatewayConfig
from .errors import (
    ConflictError,
    EngineError,
    StatusError,
    UnknownIdError,
    VersionError,
)
from .graph import cti_from_document, landscape_from_document
from .kb import CATALOG_KINDS, ingest_catalog, ingest_knowledge_base
from .register import (
    attach_controls,
    create_assessment,
    load_or_create_register,
    run_pipeline,
    save_register,
    submit_scores,
    whatif as whatif_op,
)
from .report import generate_report, render_report_markdown
from .scoring import default_rubric, rubric_from_document, score_from_dict


def _status_for(exc: EngineError) -> int:
    if isinstance(exc, UnknownIdError):
        return 404
    if isinstance(exc, (StatusError, ConflictError)):
        return 409
    if isinstance(exc, VersionError):
        return 422
    return 400


def _error_body(exc: EngineError) -> dict[str, Any]:
    body: dict[str, Any] = {"detail": str(exc)}
    findings = getattr(exc, "findings", None)
    if findings:
        body["findings"] = list(findings)
    return body


def _kb_from_payload(document: dict[str, Any]):
    kind = document.get("kind")
    if kind == "knowledge_base":
        return ingest_knowledge_base(document)
    if kind in CATALOG_KINDS:
        return ingest_catalog(document, kind)
    if document.get("type") == "bundle":
        return ingest_catalog(document, "stix")
    raise EngineError(f"unrecognized knowledge document kind {kind!r}")


def create_app(config: GatewayConfig) -> FastAPI:
    """Build the application bound to the register at config.register_path."""
    config.validate()
    app = FastAPI(title="tibsa", version="0.1.0")
    app.state.config = config
    app.state.register = load_or_create_register(config.register_path)
    app.state.lock = threading.RLock()
    app.state.idempotency: dict[tuple[str, str], tuple[int, Any]] = {}

    register = app.state.register
    lock = app.state.lock

    def persist() -> None:
        save_register(register, config.register_path)

    def actor(request: Request) -> str:
        return request.headers.get("x-actor", "api")

    @app.exception_handler(EngineError)
    async def engine_error_handler(_: Request, exc: EngineError) -> JSONResponse:
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    def cached(request: Request) -> tuple[int, Any] | None:
        key = request.headers.get("idempotency-key")
        if key is None:
            return None
        return app.state.idempotency.get((request.url.path, key))

    def remember(request: Request, status_code: int, body: Any) -> None:
        key = request.headers.get("idempotency-key")
        if key is not None:
            app.state.idempotency[(request.url.path, key)] = (status_code, body)

    def assessment_summary(assessment) -> dict[str, Any]:
        return {
            "id": assessment.id,
            "mode": assessment.mode,
            "status": assessment.status,
            "created_at": assessment.created_at,
            "scoped_ttps": assessment.scoped_ttps,
            "content_hash": assessment.content_hash(),
        }

    @app.get("/assessments")
    def list_assessments() -> dict[str, Any]:
        with lock:
            rows = [assessment_summary(register.assessments[aid])
                    for aid in sorted(register.assessments)]
        return {"assessments": rows}

    @app.post("/assessments")
    async def post_assessment(request: Request, response: Response) -> Any:
        payload = await request.json()
        with lock:
            hit = cached(request)
            if hit is not None:
                response.status_code = hit[0]
                return hit[1]
            kb = _kb_from_payload(payload["kb"])
            cti = cti_from_document(payload["cti"])
            landscape = landscape_from_document(payload["landscape"])
            rubric = (rubric_from_document(payload["rubric"])
                      if payload.get("rubric") else default_rubric())
            assessment = create_assessment(
                payload.get("mode", config.default_mode), kb, cti, landscape, rubric,
                assessment_id=payload.get("id"),
                assume_breach=payload.get("assume_breach"),
                adaptation_flags=tuple(payload.get("adaptation_flags", [])),
                probable_threshold=payload.get("probable_threshold",
                                               config.probable_threshold),
                divergence_threshold=payload.get("divergence_threshold",
                                                 config.divergence_threshold),
                max_depth=payload.get("max_depth", config.max_depth),
            )
            if payload.get("controls"):
                controls, entries = effectiveness.parse_control_inventory(payload["controls"])
                attach_controls(assessment, controls, entries)
            if assessment.id in register.assessments:
                raise ConflictError(f"assessment {assessment.id!r} already exists")
            register.put(assessment, who=actor(request),
                         what=f"created assessment {assessment.id}")
            persist()
            body = assessment_summary(assessment)
            remember(request, 201, body)
        response.status_code = 201
        return body

    @app.get("/assessments/{assessment_id}")
    def get_assessment(assessment_id: str) -> dict[str, Any]:
        with lock:
            assessment = register.get(assessment_id)
            document = assessment.to_dict()
            document["content_hash"] = assessment.content_hash()
        return document

    @app.post("/assessments/{assessment_id}/scores")
    async def post_scores(assessment_id: str, request: Request) -> dict[str, Any]:
        payload = await request.json()
        raw_scores = payload.get("scores", [payload] if "ttp_id" in payload else [])
        scores = [score_from_dict(raw) for raw in raw_scores]
        with lock:
            hit = cached(request)
            if hit is not None:
                return hit[1]
            assessment = register.get(assessment_id)
            missing = submit_scores(assessment, scores)
            ran_pipeline = False
            if not missing and assessment.status == "draft":
                run_pipeline(assessment)
                ran_pipeline = True
            register.put(assessment, who=actor(request),
                         what=f"submitted {len(scores)} score(s) for {assessment.id}")
            persist()
            body = {
                "accepted": len(scores),
                "missing_scoped_ttps": missing,
                "pipeline_ran": ran_pipeline,
                "status": assessment.status,
                "content_hash": assessment.content_hash(),
            }
            remember(request, 200, body)
        return body

    @app.get("/assessments/{assessment_id}/classifications")
    def get_classifications(assessment_id: str) -> dict[str, Any]:
        with lock:
            assessment = register.get(assessment_id)
            return {
                "classifications": [c.to_dict() for c in assessment.classifications],
                "scoped_ttps": assessment.scoped_ttps,
                "mode": assessment.mode,
            }

    @app.get("/assessments/{assessment_id}/ranking")
    def get_ranking(assessment_id: str) -> dict[str, Any]:
        with lock:
            assessment = register.get(assessment_id)
            if assessment.status == "draft":
                raise StatusError("assessment has no ranking yet; status is 'draft'")
            return {
                "ttp_ranking": assessment.ttp_ranking,
                "aggregates": [assessment.aggregates[t].to_dict()
                               for t in assessment.ttp_ranking],
            }

    @app.get("/assessments/{assessment_id}/controls/ranking")
    def get_control_ranking(assessment_id: str) -> dict[str, Any]:
        with lock:
            assessment = register.get(assessment_id)
            assessment.require_status("evaluated")
            return {
                "control_ranking": assessment.control_ranking,
                "evaluations": [e.to_dict() for e in assessment.evaluations],
                "coverage_csv": (effectiveness.render_matrix_csv(assessment.coverage)
                                 if assessment.coverage else None),
            }

    @app.post("/assessments/{assessment_id}/whatif")
    async def post_whatif(assessment_id: str, request: Request) -> dict[str, Any]:
        payload = await request.json()
        with lock:
            assessment = register.get(assessment_id)
            return whatif_op(assessment, payload.get("changes", []))

    @app.post("/assessments/{assessment_id}/report")
    async def post_report(assessment_id: str, request: Request) -> dict[str, Any]:
        with lock:
            hit = cached(request)
            if hit is not None:
                return hit[1]
            assessment = register.get(assessment_id)
            report = generate_report(assessment)
            register.put(assessment, who=actor(request),
                         what=f"reported assessment {assessment.id}")
            persist()
            body = {
                "report": report.to_dict(),
                "markdown": render_report_markdown(report, assessment),
                "status": assessment.status,
                "content_hash": assessment.content_hash(),
            }
            remember(request, 200, body)
        return body

    @app.get("/graph/{assessment_id}")
    def get_graph(assessment_id: str) -> dict[str, Any]:
        with lock:
            assessment = register.get(assessment_id)
            return assessment.graph().to_node_link()

    return app
