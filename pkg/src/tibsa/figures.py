"""Matplotlib renderings written alongside the delimited report output."""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .effectiveness import format_ratio
from .graph import CausalGraph, NodeKind
from .register import Assessment

logger = logging.getLogger(__name__)

_KIND_COLUMNS = (
    NodeKind.THREAT_ACTOR,
    NodeKind.TECHNIQUE,
    NodeKind.SUB_TECHNIQUE,
    NodeKind.TACTIC,
    NodeKind.ATTACK_PATTERN,
    NodeKind.WEAKNESS,
    NodeKind.VULNERABILITY,
    NodeKind.ASSET,
    NodeKind.ACTION,
    NodeKind.GOAL,
)


def control_ratio_figure(assessment: Assessment, destination: Path) -> Path:
    """Horizontal bars: benefit-to-cost ratio per control, best on top."""
    ranked = [
        next(e for e in assessment.evaluations if e.control_id == cid)
        for cid in assessment.control_ranking
    ]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.5 * len(ranked) + 1)))
    labels = [e.control_id for e in ranked][::-1]
    ratios = [e.ratio for e in ranked][::-1]
    bars = ax.barh(labels, ratios, color="#2f6f8f")
    for bar, evaluation in zip(bars, ranked[::-1]):
        ax.text(bar.get_width(), bar.get_y() + bar.get_height() / 2,
                f" {format_ratio(evaluation.ratio)}", va="center", fontsize=9)
    ax.set_xlabel("benefit / cost")
    ax.set_title("Control ranking")
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
    return destination


def ttp_priority_figure(assessment: Assessment, destination: Path) -> Path:
    """Weighted totals for the scoped TTPs in priority order."""
    ranked = [(tid, assessment.aggregates[tid].weighted_total)
              for tid in assessment.ttp_ranking]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.5 * len(ranked) + 1)))
    labels = [tid for tid, _ in ranked][::-1]
    totals = [total for _, total in ranked][::-1]
    ax.barh(labels, totals, color="#8f2f4f")
    ax.set_xlabel("weighted total")
    ax.set_title("TTP prioritization")
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
    return destination


def coverage_figure(assessment: Assessment, destination: Path) -> Path:
    """Coverage grid with the coded entries printed into the cells."""
    grid = assessment.coverage
    controls = list(grid.control_ids) if grid else []
    ttps = list(grid.ttp_ids) if grid else []
    fig, ax = plt.subplots(
        figsize=(max(4.0, 1.1 * len(ttps) + 2), max(2.5, 0.5 * len(controls) + 1.5))
    )
    ax.set_xlim(0, max(len(ttps), 1))
    ax.set_ylim(0, max(len(controls), 1))
    for row, cid in enumerate(controls):
        for col, tid in enumerate(ttps):
            cell = grid.cell(cid, tid)
            if cell:
                ax.add_patch(plt.Rectangle((col, len(controls) - row - 1), 1, 1,
                                           color="#c9dfe8"))
                ax.text(col + 0.5, len(controls) - row - 0.5, cell.replace(" ", "\n"),
                        ha="center", va="center", fontsize=7)
    ax.set_xticks([i + 0.5 for i in range(len(ttps))])
    ax.set_xticklabels(ttps, rotation=45, ha="right", fontsize=8)
    ax.set_yticks([i + 0.5 for i in range(len(controls))])
    ax.set_yticklabels(controls[::-1], fontsize=8)
    ax.set_title("Mitigation coverage")
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
    return destination


def graph_figure(graph: CausalGraph, destination: Path) -> Path:
    """Layered sketch of the causal graph, one column per node kind."""
    columns: dict[NodeKind, list[str]] = {kind: [] for kind in _KIND_COLUMNS}
    for node_id in sorted(graph.nodes):
        columns[graph.nodes[node_id].kind].append(node_id)
    used = [kind for kind in _KIND_COLUMNS if columns[kind]]
    positions: dict[str, tuple[float, float]] = {}
    for x, kind in enumerate(used):
        ids = columns[kind]
        for i, node_id in enumerate(ids):
            positions[node_id] = (float(x), -(i - (len(ids) - 1) / 2))

    fig, ax = plt.subplots(figsize=(max(6.0, 1.8 * len(used)), 6))
    for edge in graph.edges:
        x1, y1 = positions[edge.source]
        x2, y2 = positions[edge.target]
        ax.annotate(
            "", xy=(x2, y2), xytext=(x1, y1),
            arrowprops={"arrowstyle": "->", "color": "#777777",
                        "alpha": 0.3 + 0.12 * edge.confidence},
        )
    for node_id, (x, y) in positions.items():
        ax.plot(x, y, "o", markersize=9, color="#2f6f8f")
        ax.text(x, y + 0.12, node_id, ha="center", fontsize=7)
    ax.set_xticks(range(len(used)))
    ax.set_xticklabels([kind.value for kind in used], fontsize=8)
    ax.set_yticks([])
    ax.set_title("Causal attack graph")
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
    return destination


def render_report_figures(assessment: Assessment, directory: Path) -> list[Path]:
    """Write every figure the report references; returns the paths."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if assessment.control_ranking:
        written.append(control_ratio_figure(assessment, directory / "control_ratios.png"))
    if assessment.ttp_ranking:
        written.append(ttp_priority_figure(assessment, directory / "ttp_priorities.png"))
    if assessment.coverage and assessment.coverage.control_ids:
        written.append(coverage_figure(assessment, directory / "coverage.png"))
    written.append(graph_figure(assessment.graph(), directory / "attack_graph.png"))
    logger.info("rendered %d figure(s) into %s", len(written), directory)
    return written
