"""Knowledge base ingestion and cross-reference resolution.

Catalogs of techniques, attack patterns, weaknesses, and vulnerabilities are
parsed from versioned JSON documents into one queryable knowledge base.
Cross-references link the four kinds into exploitation chains:

    technique -> attack pattern -> weakness -> vulnerability -> platform tags

Validation of dangling references is advisory; only duplicate identifiers
and malformed documents block ingestion.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable

from .canonical import canonical_dumps, content_hash, utc_now
from .errors import ConflictError, ParseError, UnknownIdError, VersionError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
CATALOG_KINDS = ("techniques", "attack_patterns", "weaknesses", "vulnerabilities")

# STIX source names whose external_id fields carry the identifiers we keep.
_STIX_TECHNIQUE_SOURCES = {"mitre-attack", "mitre-mobile-attack", "mitre-ics-attack"}
_STIX_PATTERN_SOURCES = {"capec"}


# ---------------------------------------------------------------------------
# record types
# ---------------------------------------------------------------------------

@dataclass
class TechniqueRecord:
    """One adversary technique or sub-technique.

    ``extra`` keeps any fields the source document carried beyond the
    recognized ones so that round-trips are lossless.
    """

    id: str
    name: str
    tactic_ids: tuple[str, ...]
    parent_id: str | None = None
    platforms: tuple[str, ...] = ()
    attack_pattern_refs: tuple[str, ...] = ()
    source: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "tactic_ids": list(self.tactic_ids),
            "platforms": list(self.platforms),
            "attack_pattern_refs": list(self.attack_pattern_refs),
            "source": self.source,
        }
        if self.parent_id is not None:
            doc["parent_id"] = self.parent_id
        doc.update(self.extra)
        return doc


@dataclass
class AttackPatternRecord:
    id: str
    name: str
    weakness_refs: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "weakness_refs": list(self.weakness_refs),
        }
        doc.update(self.extra)
        return doc


@dataclass
class WeaknessRecord:
    id: str
    name: str
    vulnerability_refs: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "vulnerability_refs": list(self.vulnerability_refs),
        }
        doc.update(self.extra)
        return doc


@dataclass
class VulnerabilityRecord:
    id: str
    name: str
    platforms: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "platforms": list(self.platforms),
        }
        doc.update(self.extra)
        return doc


_RECORD_TYPES = {
    "techniques": TechniqueRecord,
    "attack_patterns": AttackPatternRecord,
    "weaknesses": WeaknessRecord,
    "vulnerabilities": VulnerabilityRecord,
}


@dataclass
class Provenance:
    """Where a catalog came from: source label, content hash, ingest time."""

    source: str
    digest: str
    ingested_at: str

    def to_dict(self) -> dict[str, Any]:
        return {"source": self.source, "digest": self.digest, "ingested_at": self.ingested_at}


@dataclass
class KnowledgeBase:
    """Merged catalogs indexed by record id, one bucket per kind."""

    techniques: dict[str, TechniqueRecord] = field(default_factory=dict)
    attack_patterns: dict[str, AttackPatternRecord] = field(default_factory=dict)
    weaknesses: dict[str, WeaknessRecord] = field(default_factory=dict)
    vulnerabilities: dict[str, VulnerabilityRecord] = field(default_factory=dict)
    provenance: list[Provenance] = field(default_factory=list, compare=False)

    def bucket(self, kind: str) -> dict[str, Any]:
        return getattr(self, kind)

    def get(self, record_id: str) -> Any | None:
        for kind in CATALOG_KINDS:
            record = self.bucket(kind).get(record_id)
            if record is not None:
                return record
        return None

    def all_ids(self) -> set[str]:
        ids: set[str] = set()
        for kind in CATALOG_KINDS:
            ids.update(self.bucket(kind))
        return ids

    def to_document(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "knowledge_base",
            "catalogs": {
                kind: [self.bucket(kind)[rid].to_dict() for rid in sorted(self.bucket(kind))]
                for kind in CATALOG_KINDS
            },
            "provenance": [p.to_dict() for p in self.provenance],
        }

    def snapshot_hash(self) -> str:
        """Hash over record content only; provenance does not participate."""
        doc = self.to_document()
        doc.pop("provenance")
        return content_hash(doc)


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _load_json(document: str | dict[str, Any]) -> dict[str, Any]:
    if isinstance(document, dict):
        return document
    try:
        parsed = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(parsed, dict):
        raise ParseError("top-level JSON value must be an object")
    return parsed


def _require_str(raw: dict[str, Any], key: str, where: str) -> str:
    value = raw.get(key)
    if not isinstance(value, str) or not value:
        raise ParseError(f"{where}: expected a non-empty string", field=key)
    return value


def _optional_str_list(raw: dict[str, Any], key: str, where: str) -> tuple[str, ...]:
    value = raw.get(key, [])
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise ParseError(f"{where}: expected a list of strings", field=key)
    return tuple(value)


def _parse_record(kind: str, raw: dict[str, Any], index: int) -> Any:
    where = f"records[{index}]"
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object")
    rid = _require_str(raw, "id", where)
    name = _require_str(raw, "name", where)
    if kind == "techniques":
        tactic_ids = _optional_str_list(raw, "tactic_ids", where)
        if not tactic_ids:
            raise ParseError(f"{where}: technique needs at least one tactic", field="tactic_ids")
        parent_id = raw.get("parent_id")
        if parent_id is not None and not isinstance(parent_id, str):
            raise ParseError(f"{where}: expected a string", field="parent_id")
        known = {"id", "name", "tactic_ids", "parent_id", "platforms", "attack_pattern_refs", "source"}
        return TechniqueRecord(
            id=rid,
            name=name,
            tactic_ids=tactic_ids,
            parent_id=parent_id,
            platforms=_optional_str_list(raw, "platforms", where),
            attack_pattern_refs=_optional_str_list(raw, "attack_pattern_refs", where),
            source=raw.get("source", "") if isinstance(raw.get("source", ""), str) else "",
            extra={k: v for k, v in raw.items() if k not in known},
        )
    if kind == "attack_patterns":
        known = {"id", "name", "weakness_refs"}
        return AttackPatternRecord(
            id=rid,
            name=name,
            weakness_refs=_optional_str_list(raw, "weakness_refs", where),
            extra={k: v for k, v in raw.items() if k not in known},
        )
    if kind == "weaknesses":
        known = {"id", "name", "vulnerability_refs"}
        return WeaknessRecord(
            id=rid,
            name=name,
            vulnerability_refs=_optional_str_list(raw, "vulnerability_refs", where),
            extra={k: v for k, v in raw.items() if k not in known},
        )
    if kind == "vulnerabilities":
        known = {"id", "name", "platforms"}
        return VulnerabilityRecord(
            id=rid,
            name=name,
            platforms=_optional_str_list(raw, "platforms", where),
            extra={k: v for k, v in raw.items() if k not in known},
        )
    raise ParseError(f"unknown catalog kind {kind!r}", field="kind")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def ingest_catalog(document: str | dict[str, Any], kind: str, *, source: str = "") -> KnowledgeBase:
    """Parse one catalog document into a fresh knowledge base.

    ``kind`` must match the document's own kind field. The special kind
    ``stix`` accepts a STIX 2.1 bundle and converts its attack-pattern
    objects into technique records.
    """
    parsed = _load_json(document)
    if kind == "stix":
        records = _records_from_stix(parsed)
        effective_kind = "techniques"
    else:
        if kind not in CATALOG_KINDS:
            raise ParseError(f"unknown catalog kind {kind!r}", field="kind")
        version = parsed.get("schema_version")
        if version != SCHEMA_VERSION:
            raise VersionError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION!r})")
        declared = parsed.get("kind")
        if declared != kind:
            raise ParseError(f"document kind {declared!r} does not match requested {kind!r}", field="kind")
        raw_records = parsed.get("records")
        if not isinstance(raw_records, list):
            raise ParseError("expected a list", field="records")
        records = [_parse_record(kind, raw, i) for i, raw in enumerate(raw_records)]
        effective_kind = kind

    kb = KnowledgeBase()
    bucket = kb.bucket(effective_kind)
    for record in records:
        if record.id in bucket:
            raise ConflictError(f"duplicate {effective_kind} id {record.id!r} in one document")
        bucket[record.id] = record
    kb.provenance.append(Provenance(source=source or "<inline>", digest=content_hash(parsed), ingested_at=utc_now()))
    logger.info("ingested %d %s record(s) from %s", len(records), effective_kind, source or "<inline>")
    return kb


def ingest_knowledge_base(document: str | dict[str, Any]) -> KnowledgeBase:
    """Re-ingest a serialized knowledge base (the to_document form)."""
    parsed = _load_json(document)
    if parsed.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {parsed.get('schema_version')!r}")
    if parsed.get("kind") != "knowledge_base":
        raise ParseError(f"document kind {parsed.get('kind')!r} is not knowledge_base", field="kind")
    catalogs = parsed.get("catalogs")
    if not isinstance(catalogs, dict):
        raise ParseError("expected an object", field="catalogs")
    kb = KnowledgeBase()
    for kind in CATALOG_KINDS:
        raw_records = catalogs.get(kind, [])
        if not isinstance(raw_records, list):
            raise ParseError("expected a list", field=f"catalogs.{kind}")
        bucket = kb.bucket(kind)
        for i, raw in enumerate(raw_records):
            record = _parse_record(kind, raw, i)
            if record.id in bucket:
                raise ConflictError(f"duplicate {kind} id {record.id!r} in one document")
            bucket[record.id] = record
    for raw in parsed.get("provenance", []):
        kb.provenance.append(Provenance(
            source=raw.get("source", ""),
            digest=raw.get("digest", ""),
            ingested_at=raw.get("ingested_at", ""),
        ))
    return kb


def merge_catalogs(a: KnowledgeBase, b: KnowledgeBase) -> KnowledgeBase:
    """Union two knowledge bases.

    Records with the same id must have identical content; any divergence is
    a conflict and the merge fails as a whole.
    """
    merged = KnowledgeBase()
    for kind in CATALOG_KINDS:
        bucket = merged.bucket(kind)
        for source in (a, b):
            for rid, record in source.bucket(kind).items():
                existing = bucket.get(rid)
                if existing is None:
                    bucket[rid] = record
                elif canonical_dumps(existing.to_dict()) != canonical_dumps(record.to_dict()):
                    raise ConflictError(f"conflicting content for {kind} id {rid!r}")
    merged.provenance = list(a.provenance) + list(b.provenance)
    return merged


@dataclass(frozen=True)
class Chain:
    """One exploitation chain rooted at a technique.

    Levels are populated as far as stored cross-references reach; a chain
    of length 1 is a technique with no attack-pattern references.
    """

    technique_id: str
    attack_pattern_id: str | None = None
    weakness_id: str | None = None
    vulnerability_id: str | None = None
    asset_tags: tuple[str, ...] = ()

    def links(self) -> tuple[str, ...]:
        out = [self.technique_id]
        for value in (self.attack_pattern_id, self.weakness_id, self.vulnerability_id):
            if value is None:
                break
            out.append(value)
        return tuple(out)

    def __len__(self) -> int:
        return len(self.links())

    def to_dict(self) -> dict[str, Any]:
        return {
            "technique_id": self.technique_id,
            "attack_pattern_id": self.attack_pattern_id,
            "weakness_id": self.weakness_id,
            "vulnerability_id": self.vulnerability_id,
            "asset_tags": list(self.asset_tags),
        }


def resolve_chain(kb: KnowledgeBase, technique_id: str) -> list[Chain]:
    """Expand every stored reference chain below one technique.

    Chains are exhaustive over the stored cross-references and ordered
    lexicographically level by level. References that do not resolve still
    appear as chain links; expansion simply stops there.
    """
    technique = kb.techniques.get(technique_id)
    if technique is None:
        raise UnknownIdError(f"unknown technique id {technique_id!r}")
    chains: list[Chain] = []
    if not technique.attack_pattern_refs:
        return [Chain(technique_id=technique_id)]
    for pattern_id in sorted(technique.attack_pattern_refs):
        pattern = kb.attack_patterns.get(pattern_id)
        if pattern is None or not pattern.weakness_refs:
            chains.append(Chain(technique_id=technique_id, attack_pattern_id=pattern_id))
            continue
        for weakness_id in sorted(pattern.weakness_refs):
            weakness = kb.weaknesses.get(weakness_id)
            if weakness is None or not weakness.vulnerability_refs:
                chains.append(Chain(
                    technique_id=technique_id,
                    attack_pattern_id=pattern_id,
                    weakness_id=weakness_id,
                ))
                continue
            for vulnerability_id in sorted(weakness.vulnerability_refs):
                vulnerability = kb.vulnerabilities.get(vulnerability_id)
                tags = tuple(sorted(vulnerability.platforms)) if vulnerability else ()
                chains.append(Chain(
                    technique_id=technique_id,
                    attack_pattern_id=pattern_id,
                    weakness_id=weakness_id,
                    vulnerability_id=vulnerability_id,
                    asset_tags=tags,
                ))
    return chains


@dataclass(frozen=True)
class ValidationFinding:
    """One dangling cross-reference."""

    source_kind: str
    source_id: str
    ref_field: str
    target_id: str

    def to_dict(self) -> dict[str, str]:
        return {
            "source_kind": self.source_kind,
            "source_id": self.source_id,
            "ref_field": self.ref_field,
            "target_id": self.target_id,
        }


@dataclass
class ValidationReport:
    findings: list[ValidationFinding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "findings": [f.to_dict() for f in self.findings]}


def validate_catalog(kb: KnowledgeBase) -> ValidationReport:
    """Report every cross-reference that does not resolve. Advisory only."""
    report = ValidationReport()

    def check(source_kind: str, source_id: str, ref_field: str, target_id: str, bucket: dict) -> None:
        if target_id not in bucket:
            report.findings.append(ValidationFinding(source_kind, source_id, ref_field, target_id))

    for rid in sorted(kb.techniques):
        record = kb.techniques[rid]
        if record.parent_id is not None:
            check("techniques", rid, "parent_id", record.parent_id, kb.techniques)
        for ref in sorted(record.attack_pattern_refs):
            check("techniques", rid, "attack_pattern_refs", ref, kb.attack_patterns)
    for rid in sorted(kb.attack_patterns):
        for ref in sorted(kb.attack_patterns[rid].weakness_refs):
            check("attack_patterns", rid, "weakness_refs", ref, kb.weaknesses)
    for rid in sorted(kb.weaknesses):
        for ref in sorted(kb.weaknesses[rid].vulnerability_refs):
            check("weaknesses", rid, "vulnerability_refs", ref, kb.vulnerabilities)
    return report


# ---------------------------------------------------------------------------
# STIX bundle conversion
# ---------------------------------------------------------------------------

def _external_id(obj: dict[str, Any], sources: set[str]) -> str | None:
    for ref in obj.get("external_references", []):
        if isinstance(ref, dict) and ref.get("source_name") in sources:
            ext = ref.get("external_id")
            if isinstance(ext, str) and ext:
                return ext
    return None


def _records_from_stix(bundle: dict[str, Any]) -> list[TechniqueRecord]:
    """Map a STIX bundle's attack-pattern objects onto technique records.

    Only fields with a direct counterpart are mapped: external technique id,
    name, kill-chain phase names as tactic ids, platforms, CAPEC references,
    and the parent derived from subtechnique-of relationships.
    """
    if bundle.get("type") != "bundle":
        raise ParseError(f"expected a STIX bundle, got type {bundle.get('type')!r}", field="type")
    objects = bundle.get("objects")
    if not isinstance(objects, list):
        raise ParseError("expected a list", field="objects")

    by_stix_id: dict[str, dict[str, Any]] = {}
    parents: dict[str, str] = {}
    for obj in objects:
        if not isinstance(obj, dict):
            continue
        if obj.get("type") == "attack-pattern" and not obj.get("revoked") and not obj.get("x_mitre_deprecated"):
            by_stix_id[obj.get("id", "")] = obj
        elif obj.get("type") == "relationship" and obj.get("relationship_type") == "subtechnique-of":
            parents[obj.get("source_ref", "")] = obj.get("target_ref", "")

    records: list[TechniqueRecord] = []
    for stix_id, obj in by_stix_id.items():
        ext_id = _external_id(obj, _STIX_TECHNIQUE_SOURCES)
        if ext_id is None:
            continue
        tactic_ids = tuple(
            phase.get("phase_name", "")
            for phase in obj.get("kill_chain_phases", [])
            if isinstance(phase, dict) and phase.get("phase_name")
        )
        if not tactic_ids:
            continue
        parent_id = None
        parent_ref = parents.get(stix_id)
        if parent_ref and parent_ref in by_stix_id:
            parent_id = _external_id(by_stix_id[parent_ref], _STIX_TECHNIQUE_SOURCES)
        pattern_refs = tuple(sorted(
            ref.get("external_id")
            for ref in obj.get("external_references", [])
            if isinstance(ref, dict)
            and ref.get("source_name") in _STIX_PATTERN_SOURCES
            and isinstance(ref.get("external_id"), str)
        ))
        platforms = tuple(p for p in obj.get("x_mitre_platforms", []) if isinstance(p, str))
        records.append(TechniqueRecord(
            id=ext_id,
            name=obj.get("name", ext_id),
            tactic_ids=tactic_ids,
            parent_id=parent_id,
            platforms=platforms,
            attack_pattern_refs=pattern_refs,
            source="stix",
        ))
    records.sort(key=lambda r: r.id)
    return records


def kbs_equal(a: KnowledgeBase, b: KnowledgeBase) -> bool:
    """Record-content equality; provenance is intentionally excluded."""
    return a == b


def iter_records(kb: KnowledgeBase) -> Iterable[Any]:
    for kind in CATALOG_KINDS:
        yield from kb.bucket(kind).values()
