"""Threat-intelligence based security assessment engine.

Turns threat catalogs plus a CTI report into a causal attack graph, triages
the evidenced TTPs against an organization's landscape, aggregates panel
scores, evaluates mitigating controls by benefit-to-cost ratio, and keeps the
whole assessment in a persistent, audited risk register.
"""

from .canonical import canonical_dumps, content_hash, pretty_dumps
from .config import GatewayConfig, config_from_env
from .effectiveness import (
    ControlEvaluation,
    ControlRecord,
    CoverageMatrix,
    EffectivenessLevel,
    MitigationCriterion,
    MitigationEntry,
    ScoreMatrix,
    bc_ratio,
    control_benefit,
    control_cost,
    coverage_matrix,
    default_matrix,
    evaluate_controls,
    format_ratio,
    matrix_from_document,
    mitigation_score,
    parse_control_inventory,
    rank_controls,
    upgrade_effect,
)
from .errors import (
    ConflictError,
    CycleError,
    EngineError,
    InputValidationError,
    IntegrityError,
    MatrixConfigError,
    ParseError,
    StatusError,
    UnknownIdError,
    VersionError,
)
from .graph import (
    AttackPath,
    CausalEdge,
    CausalGraph,
    CausalNode,
    CtiReport,
    EdgeRelation,
    LandscapeInventory,
    NodeKind,
    ReplanResult,
    TtpClass,
    TtpClassification,
    adversary_best_path,
    build_graph,
    classify_ttps,
    cti_from_document,
    detect_coverage,
    enumerate_paths,
    impact_score,
    landscape_from_document,
    path_propensity,
    replan_after_control,
)
from .kb import (
    KnowledgeBase,
    ingest_catalog,
    ingest_knowledge_base,
    merge_catalogs,
    resolve_chain,
    validate_catalog,
)
from .register import (
    Assessment,
    RiskRegister,
    attach_controls,
    create_assessment,
    load_register,
    run_pipeline,
    save_register,
    submit_scores,
    whatif,
)
from .report import Report, generate_report, render_report_markdown
from .scoring import (
    AggregatedScore,
    AssessorScore,
    Rubric,
    aggregate,
    default_rubric,
    rank_ttps,
    rubric_from_document,
    validate_score,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatedScore",
    "Assessment",
    "AssessorScore",
    "AttackPath",
    "CausalEdge",
    "CausalGraph",
    "CausalNode",
    "ConflictError",
    "ControlEvaluation",
    "ControlRecord",
    "CoverageMatrix",
    "CtiReport",
    "CycleError",
    "EdgeRelation",
    "EffectivenessLevel",
    "EngineError",
    "GatewayConfig",
    "InputValidationError",
    "IntegrityError",
    "KnowledgeBase",
    "LandscapeInventory",
    "MatrixConfigError",
    "MitigationCriterion",
    "MitigationEntry",
    "NodeKind",
    "ParseError",
    "Report",
    "ReplanResult",
    "RiskRegister",
    "Rubric",
    "ScoreMatrix",
    "StatusError",
    "TtpClass",
    "TtpClassification",
    "UnknownIdError",
    "VersionError",
    "adversary_best_path",
    "aggregate",
    "attach_controls",
    "bc_ratio",
    "build_graph",
    "canonical_dumps",
    "classify_ttps",
    "config_from_env",
    "content_hash",
    "control_benefit",
    "control_cost",
    "coverage_matrix",
    "create_assessment",
    "cti_from_document",
    "default_matrix",
    "default_rubric",
    "detect_coverage",
    "enumerate_paths",
    "evaluate_controls",
    "format_ratio",
    "generate_report",
    "impact_score",
    "ingest_catalog",
    "ingest_knowledge_base",
    "landscape_from_document",
    "load_register",
    "matrix_from_document",
    "merge_catalogs",
    "mitigation_score",
    "parse_control_inventory",
    "path_propensity",
    "pretty_dumps",
    "rank_controls",
    "rank_ttps",
    "render_report_markdown",
    "replan_after_control",
    "resolve_chain",
    "rubric_from_document",
    "run_pipeline",
    "save_register",
    "submit_scores",
    "upgrade_effect",
    "validate_catalog",
    "validate_score",
    "whatif",
]
