"""Security-control effectiveness: mitigation scores, benefit/cost, coverage.

A control mitigates TTPs along four criteria (prevent, detect, constrain,
recover) at three strengths. Each (criterion, level) pair maps to a fixed
score; a control's benefit sums its scores across the mitigated TTPs and is
weighed against its lifecycle cost.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Any, Iterable, Mapping

from .errors import (
    ConflictError,
    InputValidationError,
    MatrixConfigError,
    ParseError,
    UnknownIdError,
    VersionError,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


class MitigationCriterion(str, Enum):
    PREVENT = "PREVENT"
    DETECT = "DETECT"
    CONSTRAIN = "CONSTRAIN"
    RECOVER = "RECOVER"


class EffectivenessLevel(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"

    @property
    def code(self) -> str:
        return {"high": "H", "medium": "M", "low": "L"}[self.value]


_LEVEL_ORDER = (EffectivenessLevel.HIGH, EffectivenessLevel.MEDIUM, EffectivenessLevel.LOW)
_LEVEL_ALIASES = {
    "H": EffectivenessLevel.HIGH, "HIGH": EffectivenessLevel.HIGH,
    "M": EffectivenessLevel.MEDIUM, "MEDIUM": EffectivenessLevel.MEDIUM,
    "L": EffectivenessLevel.LOW, "LOW": EffectivenessLevel.LOW,
}


def parse_level(value: str) -> EffectivenessLevel:
    level = _LEVEL_ALIASES.get(str(value).strip().upper())
    if level is None:
        raise ParseError(f"unknown effectiveness level {value!r}", field="level")
    return level


# ---------------------------------------------------------------------------
# score matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixCriterion:
    name: str
    code: str
    scores: Mapping[EffectivenessLevel, int]


@dataclass(frozen=True)
class ScoreMatrix:
    """Ordered (criterion, level) -> score table.

    Criteria are listed strongest first; validation enforces that ordering
    (each criterion dominates the next at every level) and that high beats
    medium beats low within a criterion.
    """

    criteria: tuple[MatrixCriterion, ...]

    def __post_init__(self) -> None:
        names = [c.name for c in self.criteria]
        codes = [c.code for c in self.criteria]
        if len(set(names)) != len(names) or len(set(codes)) != len(codes):
            raise MatrixConfigError("criterion names and codes must be unique")
        for criterion in self.criteria:
            missing = [lv.value for lv in _LEVEL_ORDER if lv not in criterion.scores]
            if missing:
                raise MatrixConfigError(f"{criterion.name}: missing level(s) {', '.join(missing)}")
            high = criterion.scores[EffectivenessLevel.HIGH]
            medium = criterion.scores[EffectivenessLevel.MEDIUM]
            low = criterion.scores[EffectivenessLevel.LOW]
            if not high > medium > low:
                raise MatrixConfigError(
                    f"{criterion.name}: levels must strictly decrease "
                    f"(got high={high}, medium={medium}, low={low})"
                )
            if low <= 0:
                raise MatrixConfigError(f"{criterion.name}: scores must be positive")
        for stronger, weaker in zip(self.criteria, self.criteria[1:]):
            for level in _LEVEL_ORDER:
                if stronger.scores[level] < weaker.scores[level]:
                    raise MatrixConfigError(
                        f"{stronger.name} must dominate {weaker.name} at level "
                        f"{level.value} ({stronger.scores[level]} < {weaker.scores[level]})"
                    )

    def criterion_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.criteria)

    def by_name(self, name: str) -> MatrixCriterion:
        wanted = str(name).strip().upper()
        for criterion in self.criteria:
            if criterion.name == wanted or criterion.code == wanted:
                return criterion
        raise UnknownIdError(f"unknown mitigation criterion {name!r}")

    def score(self, criterion: str, level: EffectivenessLevel | str) -> int:
        if not isinstance(level, EffectivenessLevel):
            level = parse_level(level)
        return self.by_name(criterion).scores[level]

    def cell_code(self, criterion: str, level: EffectivenessLevel) -> str:
        return f"{self.by_name(criterion).code}.{level.code}"

    def to_document(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "criteria": [
                {
                    "name": c.name,
                    "code": c.code,
                    "scores": {lv.value: c.scores[lv] for lv in _LEVEL_ORDER},
                }
                for c in self.criteria
            ],
        }


def default_matrix() -> ScoreMatrix:
    """The shipped score table."""
    table = (
        ("PREVENT", "PR", 12, 10, 8),
        ("DETECT", "DT", 8, 6, 4),
        ("CONSTRAIN", "CS", 7, 5, 3),
        ("RECOVER", "RE", 5, 3, 1),
    )
    return ScoreMatrix(criteria=tuple(
        MatrixCriterion(name=name, code=code, scores={
            EffectivenessLevel.HIGH: high,
            EffectivenessLevel.MEDIUM: medium,
            EffectivenessLevel.LOW: low,
        })
        for name, code, high, medium, low in table
    ))


def matrix_from_document(document: dict[str, Any]) -> ScoreMatrix:
    """Load a replacement score table; ordering rules are enforced."""
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
    raw_criteria = document.get("criteria")
    if not isinstance(raw_criteria, list) or not raw_criteria:
        raise ParseError("expected a non-empty list", field="criteria")
    criteria: list[MatrixCriterion] = []
    for i, raw in enumerate(raw_criteria):
        where = f"criteria[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        name = raw.get("name")
        code = raw.get("code")
        scores = raw.get("scores")
        if not isinstance(name, str) or not name:
            raise ParseError(f"{where}: expected a non-empty string", field="name")
        if not isinstance(code, str) or not code:
            raise ParseError(f"{where}: expected a non-empty string", field="code")
        if not isinstance(scores, dict):
            raise ParseError(f"{where}: expected an object", field="scores")
        parsed: dict[EffectivenessLevel, int] = {}
        for level in _LEVEL_ORDER:
            value = scores.get(level.value)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ParseError(f"{where}: integer score required", field=f"scores.{level.value}")
            parsed[level] = value
        criteria.append(MatrixCriterion(name=name.upper(), code=code.upper(), scores=parsed))
    return ScoreMatrix(criteria=tuple(criteria))


def mitigation_score(
    criterion: MitigationCriterion | str,
    level: EffectivenessLevel | str,
    matrix: ScoreMatrix | None = None,
) -> int:
    """Table lookup for one (criterion, level) pair."""
    matrix = matrix or default_matrix()
    name = criterion.value if isinstance(criterion, MitigationCriterion) else str(criterion)
    return matrix.score(name, level)


# ---------------------------------------------------------------------------
# controls and evaluations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MitigationEntry:
    """One control's effect against one TTP along one criterion."""

    control_id: str
    ttp_id: str
    criterion: str
    level: EffectivenessLevel

    def key(self) -> tuple[str, str, str]:
        return (self.control_id, self.ttp_id, self.criterion)

    def to_dict(self) -> dict[str, str]:
        return {
            "control_id": self.control_id,
            "ttp_id": self.ttp_id,
            "criterion": self.criterion,
            "level": self.level.value,
        }


@dataclass(frozen=True)
class ControlRecord:
    id: str
    name: str
    develop_cost: float
    implement_cost: float
    maintain_cost: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "cost": {
                "develop": self.develop_cost,
                "implement": self.implement_cost,
                "maintain": self.maintain_cost,
            },
        }


@dataclass(frozen=True)
class ControlEvaluation:
    control_id: str
    benefit: int
    cost: float
    ratio: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "control_id": self.control_id,
            "benefit": self.benefit,
            "cost": self.cost,
            "ratio": self.ratio,
            "ratio_display": format_ratio(self.ratio),
        }


def entry_from_dict(
    raw: dict[str, Any],
    control_id: str,
    matrix: ScoreMatrix | None = None,
) -> MitigationEntry:
    if not isinstance(raw, dict):
        raise ParseError("expected an object for a mitigation entry")
    ttp_id = raw.get("ttp_id")
    criterion = raw.get("criterion")
    if not isinstance(ttp_id, str) or not ttp_id:
        raise ParseError("expected a non-empty string", field="ttp_id")
    if not isinstance(criterion, str) or not criterion:
        raise ParseError("expected a non-empty string", field="criterion")
    matrix = matrix or default_matrix()
    return MitigationEntry(
        control_id=control_id,
        ttp_id=ttp_id,
        criterion=matrix.by_name(criterion).name,  # accepts codes like "PR"
        level=parse_level(raw.get("level", "")),
    )


def parse_control_inventory(
    document: dict[str, Any],
    matrix: ScoreMatrix | None = None,
) -> tuple[list[ControlRecord], list[MitigationEntry]]:
    """Parse the control inventory file format."""
    matrix = matrix or default_matrix()
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
    raw_controls = document.get("controls")
    if not isinstance(raw_controls, list):
        raise ParseError("expected a list", field="controls")
    controls: list[ControlRecord] = []
    entries: list[MitigationEntry] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_controls):
        where = f"controls[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        cid = raw.get("id")
        if not isinstance(cid, str) or not cid:
            raise ParseError(f"{where}: expected a non-empty string", field="id")
        if cid in seen:
            raise ConflictError(f"duplicate control id {cid!r}")
        seen.add(cid)
        cost = raw.get("cost", {})
        if not isinstance(cost, dict):
            raise ParseError(f"{where}: expected an object", field="cost")
        record = ControlRecord(
            id=cid,
            name=raw.get("name", cid),
            develop_cost=float(cost.get("develop", 0)),
            implement_cost=float(cost.get("implement", 0)),
            maintain_cost=float(cost.get("maintain", 0)),
        )
        control_cost(record)  # fail fast on non-positive totals
        controls.append(record)
        for raw_entry in raw.get("mitigations", []):
            entries.append(entry_from_dict(raw_entry, cid, matrix))
    return controls, entries


def control_benefit(
    entries: Iterable[MitigationEntry],
    matrix: ScoreMatrix | None = None,
) -> int:
    """Sum of mitigation scores across one control's entries.

    All entries must belong to the same control and a (ttp, criterion) pair
    may appear only once.
    """
    matrix = matrix or default_matrix()
    rows = list(entries)
    control_ids = {e.control_id for e in rows}
    if len(control_ids) > 1:
        raise InputValidationError([f"entries mix control ids: {', '.join(sorted(control_ids))}"])
    seen: set[tuple[str, str]] = set()
    total = 0
    for entry in rows:
        pair = (entry.ttp_id, entry.criterion)
        if pair in seen:
            raise ConflictError(f"duplicate mitigation for ttp {entry.ttp_id!r} criterion {entry.criterion!r}")
        seen.add(pair)
        total += matrix.score(entry.criterion, entry.level)
    return total


def control_cost(control: ControlRecord) -> float:
    """Total lifecycle cost: develop + implement + maintain. Must be > 0."""
    components = {
        "develop": control.develop_cost,
        "implement": control.implement_cost,
        "maintain": control.maintain_cost,
    }
    for label, value in components.items():
        if value < 0:
            raise InputValidationError([f"{control.id}: {label} cost must be >= 0"])
    total = sum(components.values())
    if total <= 0:
        raise InputValidationError([f"{control.id}: total cost must be positive"])
    return total


def bc_ratio(benefit: float, cost: float) -> float:
    """Benefit over cost, kept at full precision for ranking."""
    if cost <= 0:
        raise InputValidationError(["cost must be positive"])
    return benefit / cost


def format_ratio(value: float) -> str:
    """Display form: one decimal, half-up, integers without the decimal."""
    quantized = Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)
    if quantized == quantized.to_integral_value():
        return str(int(quantized))
    return str(quantized)


def evaluate_controls(
    controls: Iterable[ControlRecord],
    entries: Iterable[MitigationEntry],
    matrix: ScoreMatrix | None = None,
) -> list[ControlEvaluation]:
    """Benefit, cost, and ratio for every control, in input order."""
    matrix = matrix or default_matrix()
    rows = list(entries)
    evaluations: list[ControlEvaluation] = []
    for control in controls:
        mine = [e for e in rows if e.control_id == control.id]
        benefit = control_benefit(mine, matrix) if mine else 0
        cost = control_cost(control)
        evaluations.append(ControlEvaluation(
            control_id=control.id,
            benefit=benefit,
            cost=cost,
            ratio=bc_ratio(benefit, cost),
        ))
    return evaluations


def rank_controls(evaluations: Iterable[ControlEvaluation]) -> list[ControlEvaluation]:
    """Best ratio first; ties prefer the larger benefit, then the id."""
    return sorted(evaluations, key=lambda e: (-e.ratio, -e.benefit, e.control_id))


# ---------------------------------------------------------------------------
# coverage matrix
# ---------------------------------------------------------------------------

@dataclass
class CoverageMatrix:
    """Controls as rows, TTPs as columns, coded entries in the cells."""

    control_ids: tuple[str, ...]
    ttp_ids: tuple[str, ...]
    cells: dict[tuple[str, str], str] = field(default_factory=dict)

    def cell(self, control_id: str, ttp_id: str) -> str:
        return self.cells.get((control_id, ttp_id), "")

    def to_dict(self) -> dict[str, Any]:
        return {
            "controls": list(self.control_ids),
            "ttps": list(self.ttp_ids),
            "rows": [
                {
                    "control_id": cid,
                    "cells": {tid: self.cell(cid, tid) for tid in self.ttp_ids if self.cell(cid, tid)},
                }
                for cid in self.control_ids
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "CoverageMatrix":
        matrix = cls(control_ids=tuple(raw["controls"]), ttp_ids=tuple(raw["ttps"]))
        for row in raw.get("rows", []):
            for tid, text in row.get("cells", {}).items():
                matrix.cells[(row["control_id"], tid)] = text
        return matrix


def coverage_matrix(
    controls: Iterable[ControlRecord],
    entries: Iterable[MitigationEntry],
    ttps: Iterable[str],
    matrix: ScoreMatrix | None = None,
) -> CoverageMatrix:
    """Render entries into the two-letter cell notation, e.g. "PR.H DT.M".

    Within a cell, entries follow the matrix's criterion order.
    """
    matrix = matrix or default_matrix()
    order = {name: i for i, name in enumerate(matrix.criterion_names())}
    control_ids = tuple(c.id for c in controls)
    ttp_ids = tuple(ttps)
    grid = CoverageMatrix(control_ids=control_ids, ttp_ids=ttp_ids)
    grouped: dict[tuple[str, str], list[MitigationEntry]] = {}
    for entry in entries:
        if entry.control_id in control_ids and entry.ttp_id in ttp_ids:
            grouped.setdefault((entry.control_id, entry.ttp_id), []).append(entry)
    for key, cell_entries in grouped.items():
        cell_entries.sort(key=lambda e: order.get(e.criterion, len(order)))
        grid.cells[key] = " ".join(matrix.cell_code(e.criterion, e.level) for e in cell_entries)
    return grid


def render_matrix_csv(grid: CoverageMatrix) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["control_id", *grid.ttp_ids])
    for cid in grid.control_ids:
        writer.writerow([cid, *(grid.cell(cid, tid) for tid in grid.ttp_ids)])
    return buffer.getvalue()


def parse_matrix_csv(text: str, matrix: ScoreMatrix | None = None) -> CoverageMatrix:
    """Inverse of render_matrix_csv; cell codes are validated."""
    matrix = matrix or default_matrix()
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or rows[0][:1] != ["control_id"]:
        raise ParseError("matrix CSV must start with a control_id header")
    ttp_ids = tuple(rows[0][1:])
    control_ids: list[str] = []
    grid = CoverageMatrix(control_ids=(), ttp_ids=ttp_ids)
    for row in rows[1:]:
        cid = row[0]
        control_ids.append(cid)
        for tid, text_cell in zip(ttp_ids, row[1:]):
            if not text_cell:
                continue
            for code in text_cell.split():
                criterion_code, _, level_code = code.partition(".")
                matrix.by_name(criterion_code)
                parse_level(level_code)
            grid.cells[(cid, tid)] = text_cell
    grid.control_ids = tuple(control_ids)
    return grid


def entries_from_cell(control_id: str, ttp_id: str, cell: str, matrix: ScoreMatrix | None = None) -> list[MitigationEntry]:
    """Expand a coded cell back into mitigation entries."""
    matrix = matrix or default_matrix()
    out: list[MitigationEntry] = []
    for code in cell.split():
        criterion_code, _, level_code = code.partition(".")
        criterion = matrix.by_name(criterion_code)
        out.append(MitigationEntry(
            control_id=control_id,
            ttp_id=ttp_id,
            criterion=criterion.name,
            level=parse_level(level_code),
        ))
    return out


# ---------------------------------------------------------------------------
# what-if deltas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UpgradeEffect:
    control_id: str
    benefit_delta: int
    new_benefit: int
    new_ratio: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "control_id": self.control_id,
            "benefit_delta": self.benefit_delta,
            "new_benefit": self.new_benefit,
            "new_ratio": self.new_ratio,
            "new_ratio_display": format_ratio(self.new_ratio),
        }


def upgrade_effect(
    entries: Iterable[MitigationEntry],
    control_id: str,
    ttp_id: str,
    criterion: str,
    new_level: EffectivenessLevel | str,
    cost: float,
    matrix: ScoreMatrix | None = None,
) -> UpgradeEffect:
    """Pure delta computation for changing one entry's level."""
    matrix = matrix or default_matrix()
    if not isinstance(new_level, EffectivenessLevel):
        new_level = parse_level(new_level)
    wanted_criterion = matrix.by_name(criterion).name
    rows = [e for e in entries if e.control_id == control_id]
    target = next((e for e in rows if e.ttp_id == ttp_id and e.criterion == wanted_criterion), None)
    if target is None:
        raise UnknownIdError(
            f"no mitigation of {ttp_id!r} along {wanted_criterion!r} for control {control_id!r}"
        )
    old_benefit = control_benefit(rows, matrix)
    delta = matrix.score(wanted_criterion, new_level) - matrix.score(wanted_criterion, target.level)
    new_benefit = old_benefit + delta
    return UpgradeEffect(
        control_id=control_id,
        benefit_delta=delta,
        new_benefit=new_benefit,
        new_ratio=bc_ratio(new_benefit, cost),
    )
