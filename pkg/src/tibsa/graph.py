"""Causal attack graph construction, path analysis, and TTP triage.

The graph links a threat actor's evidenced techniques through tactics,
exploitation chains, and landscape assets to the campaign goals. Unlike an
attack tree, a node may have several parents, so converging routes stay
distinct paths. Edge confidence (1..5) expresses how certain the causal
link is; evidenced techniques carry their intel confidence outward.

Triage sorts every technique node into probable / plausible / possible-only
/ excluded, feeding the risk sphere (act now) or the uncertainty sphere
(monitor and challenge).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

from .canonical import canonical_dumps
from .effectiveness import EffectivenessLevel, MitigationEntry, ScoreMatrix, default_matrix
from .errors import (
    ConflictError,
    CycleError,
    InputValidationError,
    ParseError,
    UnknownIdError,
    VersionError,
)
from .kb import KnowledgeBase, resolve_chain
from .scoring import IMPACT_CRITERIA

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
DEFAULT_MAX_DEPTH = 8
DEFAULT_PROBABLE_THRESHOLD = 3
DEFAULT_EDGE_CONFIDENCE = 3

ZONES = ("internet_facing", "internal", "isolated")


class NodeKind(str, Enum):
    THREAT_ACTOR = "threat_actor"
    GOAL = "goal"
    TACTIC = "tactic"
    TECHNIQUE = "technique"
    SUB_TECHNIQUE = "sub_technique"
    ATTACK_PATTERN = "attack_pattern"
    WEAKNESS = "weakness"
    VULNERABILITY = "vulnerability"
    ASSET = "asset"
    ACTION = "action"


class EdgeRelation(str, Enum):
    ACHIEVES = "achieves"
    USES = "uses"
    EXPLOITS = "exploits"
    TARGETS = "targets"
    LEADS_TO = "leads_to"


# Relations that define the goal hierarchy and must stay acyclic.
_HIERARCHY_RELATIONS = (EdgeRelation.ACHIEVES, EdgeRelation.LEADS_TO)

_TECHNIQUE_KINDS = (NodeKind.TECHNIQUE, NodeKind.SUB_TECHNIQUE)


# ---------------------------------------------------------------------------
# landscape and CTI inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    platforms: tuple[str, ...] = ()
    zone: str = "internal"
    tech_stack: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "platforms": list(self.platforms),
            "zone": self.zone,
            "tech_stack": list(self.tech_stack),
        }


@dataclass(frozen=True)
class Exclusion:
    """A TTP contradicted by landscape facts, with the analyst's reason."""

    ttp_id: str
    reason: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"ttp_id": self.ttp_id, "reason": self.reason}


@dataclass(frozen=True)
class LandscapeInventory:
    assets: tuple[Asset, ...]
    exclusions: tuple[Exclusion, ...] = ()

    def asset_ids(self) -> set[str]:
        return {a.id for a in self.assets}

    def platform_union(self) -> set[str]:
        platforms: set[str] = set()
        for asset in self.assets:
            platforms.update(asset.platforms)
        return platforms

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "assets": [a.to_dict() for a in self.assets],
            "exclusions": [e.to_dict() for e in self.exclusions],
        }


@dataclass(frozen=True)
class EvidenceItem:
    """One CTI observation tying a TTP to the campaign."""

    ttp_id: str
    evidence_level: int
    confidence: int
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "ttp_id": self.ttp_id,
            "evidence_level": self.evidence_level,
            "confidence": self.confidence,
            "note": self.note,
        }


@dataclass(frozen=True)
class CtiReport:
    campaign_id: str
    actor: str
    goals: tuple[str, ...]
    evidence: tuple[EvidenceItem, ...] = ()
    provided_assets: tuple[str, ...] = ()
    adaptation_flags: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "campaign_id": self.campaign_id,
            "actor": self.actor,
            "goals": list(self.goals),
            "evidence": [e.to_dict() for e in self.evidence],
            "provided_assets": list(self.provided_assets),
            "adaptation_flags": list(self.adaptation_flags),
        }


def landscape_from_document(document: dict[str, Any]) -> LandscapeInventory:
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
    raw_assets = document.get("assets")
    if not isinstance(raw_assets, list):
        raise ParseError("expected a list", field="assets")
    assets: list[Asset] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_assets):
        where = f"assets[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        aid = raw.get("id")
        if not isinstance(aid, str) or not aid:
            raise ParseError(f"{where}: expected a non-empty string", field="id")
        if aid in seen:
            raise ConflictError(f"duplicate asset id {aid!r}")
        seen.add(aid)
        zone = raw.get("zone", "internal")
        if zone not in ZONES:
            raise ParseError(f"{where}: zone must be one of {', '.join(ZONES)}", field="zone")
        assets.append(Asset(
            id=aid,
            name=raw.get("name", aid),
            platforms=tuple(raw.get("platforms", [])),
            zone=zone,
            tech_stack=tuple(raw.get("tech_stack", [])),
        ))
    exclusions: list[Exclusion] = []
    for i, raw in enumerate(document.get("exclusions", [])):
        where = f"exclusions[{i}]"
        if not isinstance(raw, dict) or not isinstance(raw.get("ttp_id"), str) or not raw.get("ttp_id"):
            raise ParseError(f"{where}: expected an object with a ttp_id")
        reason = raw.get("reason")
        if not isinstance(reason, str) or not reason:
            raise ParseError(f"{where}: exclusion needs a non-empty reason", field="reason")
        exclusions.append(Exclusion(ttp_id=raw["ttp_id"], reason=reason))
    return LandscapeInventory(assets=tuple(assets), exclusions=tuple(exclusions))


def cti_from_document(document: dict[str, Any]) -> CtiReport:
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
    campaign_id = document.get("campaign_id")
    if not isinstance(campaign_id, str) or not campaign_id:
        raise ParseError("expected a non-empty string", field="campaign_id")
    goals = document.get("goals")
    if not isinstance(goals, list) or not goals or any(not isinstance(g, str) or not g for g in goals):
        raise ParseError("expected a non-empty list of goal descriptors", field="goals")
    evidence: list[EvidenceItem] = []
    for i, raw in enumerate(document.get("evidence", [])):
        where = f"evidence[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        ttp_id = raw.get("ttp_id")
        if not isinstance(ttp_id, str) or not ttp_id:
            raise ParseError(f"{where}: expected a non-empty string", field="ttp_id")
        level = raw.get("evidence_level")
        confidence = raw.get("confidence")
        for label, value in (("evidence_level", level), ("confidence", confidence)):
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise ParseError(f"{where}: {label} must be an integer in 1..5", field=label)
        evidence.append(EvidenceItem(
            ttp_id=ttp_id,
            evidence_level=level,
            confidence=confidence,
            note=raw.get("note", ""),
        ))
    return CtiReport(
        campaign_id=campaign_id,
        actor=document.get("actor", ""),
        goals=tuple(goals),
        evidence=tuple(evidence),
        provided_assets=tuple(document.get("provided_assets", [])),
        adaptation_flags=tuple(document.get("adaptation_flags", [])),
    )


# ---------------------------------------------------------------------------
# graph types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CausalNode:
    id: str
    kind: NodeKind
    label: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"id": self.id, "kind": self.kind.value, "label": self.label}


@dataclass(frozen=True)
class CausalEdge:
    source: str
    target: str
    relation: EdgeRelation
    confidence: int = DEFAULT_EDGE_CONFIDENCE

    def to_dict(self) -> dict[str, Any]:
        return {
            "from": self.source,
            "to": self.target,
            "relation": self.relation.value,
            "confidence": self.confidence,
        }


class CausalGraph:
    """Validated directed graph; treat as immutable once constructed."""

    def __init__(self, nodes: Iterable[CausalNode], edges: Iterable[CausalEdge]):
        self.nodes: dict[str, CausalNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise ConflictError(f"duplicate node id {node.id!r}")
            self.nodes[node.id] = node
        self.edges: list[CausalEdge] = []
        self._by_pair: dict[tuple[str, str], CausalEdge] = {}
        for edge in edges:
            for endpoint in (edge.source, edge.target):
                if endpoint not in self.nodes:
                    raise UnknownIdError(f"edge endpoint {endpoint!r} is not a node")
            if not isinstance(edge.confidence, int) or isinstance(edge.confidence, bool) \
                    or not 1 <= edge.confidence <= 5:
                raise InputValidationError(
                    [f"edge {edge.source}->{edge.target}: confidence must be an integer in 1..5"]
                )
            pair = (edge.source, edge.target)
            if pair in self._by_pair:
                raise ConflictError(f"duplicate edge {edge.source!r} -> {edge.target!r}")
            self._by_pair[pair] = edge
            self.edges.append(edge)
        self._check_hierarchy_acyclic()
        self._adjacency: dict[str, list[str]] = {}
        for edge in self.edges:
            self._adjacency.setdefault(edge.source, []).append(edge.target)
        for targets in self._adjacency.values():
            targets.sort()

    def _check_hierarchy_acyclic(self) -> None:
        adjacency: dict[str, list[str]] = {}
        for edge in self.edges:
            if edge.relation in _HIERARCHY_RELATIONS:
                adjacency.setdefault(edge.source, []).append(edge.target)
        state: dict[str, int] = {}  # 0 in progress, 1 done

        def visit(node_id: str, trail: list[str]) -> None:
            state[node_id] = 0
            trail.append(node_id)
            for succ in adjacency.get(node_id, []):
                if state.get(succ) == 0:
                    cycle = " -> ".join(trail[trail.index(succ):] + [succ])
                    raise CycleError(f"achieves/leads_to edges form a cycle: {cycle}")
                if succ not in state:
                    visit(succ, trail)
            trail.pop()
            state[node_id] = 1

        for node_id in sorted(adjacency):
            if node_id not in state:
                visit(node_id, [])

    def successors(self, node_id: str) -> list[str]:
        return self._adjacency.get(node_id, [])

    def edge_between(self, source: str, target: str) -> CausalEdge | None:
        return self._by_pair.get((source, target))

    def goal_ids(self) -> list[str]:
        return sorted(nid for nid, node in self.nodes.items() if node.kind is NodeKind.GOAL)

    def technique_ids(self) -> list[str]:
        return sorted(nid for nid, node in self.nodes.items() if node.kind in _TECHNIQUE_KINDS)

    def to_node_link(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "nodes": [self.nodes[nid].to_dict() for nid in sorted(self.nodes)],
            "edges": [e.to_dict() for e in sorted(self.edges, key=lambda e: (e.source, e.target))],
        }

    @classmethod
    def from_node_link(cls, document: dict[str, Any]) -> "CausalGraph":
        if document.get("schema_version") != SCHEMA_VERSION:
            raise VersionError(f"unsupported schema_version {document.get('schema_version')!r}")
        nodes = [
            CausalNode(id=raw["id"], kind=NodeKind(raw["kind"]), label=raw.get("label", ""))
            for raw in document.get("nodes", [])
        ]
        edges = [
            CausalEdge(
                source=raw["from"],
                target=raw["to"],
                relation=EdgeRelation(raw["relation"]),
                confidence=int(raw.get("confidence", DEFAULT_EDGE_CONFIDENCE)),
            )
            for raw in document.get("edges", [])
        ]
        return cls(nodes, edges)


@dataclass(frozen=True)
class AttackPath:
    """A simple route from an entry technique to a goal."""

    nodes: tuple[str, ...]
    propensity: float
    detect_coverage: float = 0.0
    viability: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "propensity": self.propensity,
            "detect_coverage": self.detect_coverage,
            "viability": self.viability,
        }


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_graph(kb: KnowledgeBase, cti: CtiReport, landscape: LandscapeInventory) -> CausalGraph:
    """Assemble the campaign graph from intel, knowledge base, and landscape.

    Every evidenced technique becomes a node wired to its tactics, its
    exploitation chains, and the landscape assets its platforms (or chain
    vulnerabilities) can reach; assets lead onward to every campaign goal.
    Edges touching an evidenced technique carry that evidence's confidence,
    everything else defaults to 3.
    """
    nodes: dict[str, CausalNode] = {}
    edges: dict[tuple[str, str], CausalEdge] = {}

    def put_node(node: CausalNode) -> None:
        existing = nodes.get(node.id)
        if existing is None:
            nodes[node.id] = node
        elif existing.kind is not node.kind:
            raise ConflictError(f"node id {node.id!r} claimed as both {existing.kind.value} and {node.kind.value}")

    def put_edge(source: str, target: str, relation: EdgeRelation, confidence: int) -> None:
        edges.setdefault((source, target), CausalEdge(source, target, relation, confidence))

    actor_label = cti.actor or cti.campaign_id
    actor_id = f"actor:{actor_label}"
    put_node(CausalNode(id=actor_id, kind=NodeKind.THREAT_ACTOR, label=actor_label))

    goal_ids: list[str] = []
    for i, descriptor in enumerate(cti.goals):
        goal_id = f"goal:{i + 1}"
        goal_ids.append(goal_id)
        put_node(CausalNode(id=goal_id, kind=NodeKind.GOAL, label=descriptor))

    confidence_by_ttp: dict[str, int] = {}
    for item in cti.evidence:
        current = confidence_by_ttp.get(item.ttp_id, 0)
        confidence_by_ttp[item.ttp_id] = max(current, item.confidence)

    for ttp_id in sorted(confidence_by_ttp):
        record = kb.techniques.get(ttp_id)
        if record is None:
            raise UnknownIdError(f"evidenced ttp {ttp_id!r} is not in the knowledge base")
        confidence = confidence_by_ttp[ttp_id]
        kind = NodeKind.SUB_TECHNIQUE if record.parent_id else NodeKind.TECHNIQUE
        put_node(CausalNode(id=ttp_id, kind=kind, label=record.name))
        put_edge(actor_id, ttp_id, EdgeRelation.USES, confidence)

        for tactic_id in sorted(set(record.tactic_ids)):
            put_node(CausalNode(id=tactic_id, kind=NodeKind.TACTIC, label=tactic_id))
            put_edge(ttp_id, tactic_id, EdgeRelation.ACHIEVES, confidence)

        technique_platforms = set(record.platforms)
        for asset in sorted(landscape.assets, key=lambda a: a.id):
            if technique_platforms & set(asset.platforms):
                put_node(CausalNode(id=asset.id, kind=NodeKind.ASSET, label=asset.name))
                put_edge(ttp_id, asset.id, EdgeRelation.TARGETS, confidence)

        for chain in resolve_chain(kb, ttp_id):
            if chain.attack_pattern_id is None:
                continue
            pattern = kb.attack_patterns.get(chain.attack_pattern_id)
            put_node(CausalNode(
                id=chain.attack_pattern_id,
                kind=NodeKind.ATTACK_PATTERN,
                label=pattern.name if pattern else chain.attack_pattern_id,
            ))
            put_edge(ttp_id, chain.attack_pattern_id, EdgeRelation.USES, confidence)
            if chain.weakness_id is None:
                continue
            weakness = kb.weaknesses.get(chain.weakness_id)
            put_node(CausalNode(
                id=chain.weakness_id,
                kind=NodeKind.WEAKNESS,
                label=weakness.name if weakness else chain.weakness_id,
            ))
            put_edge(chain.attack_pattern_id, chain.weakness_id, EdgeRelation.EXPLOITS,
                     DEFAULT_EDGE_CONFIDENCE)
            if chain.vulnerability_id is None:
                continue
            vulnerability = kb.vulnerabilities.get(chain.vulnerability_id)
            put_node(CausalNode(
                id=chain.vulnerability_id,
                kind=NodeKind.VULNERABILITY,
                label=vulnerability.name if vulnerability else chain.vulnerability_id,
            ))
            put_edge(chain.weakness_id, chain.vulnerability_id, EdgeRelation.LEADS_TO,
                     DEFAULT_EDGE_CONFIDENCE)
            tags = set(chain.asset_tags)
            if not tags:
                continue
            for asset in sorted(landscape.assets, key=lambda a: a.id):
                if tags & set(asset.platforms):
                    put_node(CausalNode(id=asset.id, kind=NodeKind.ASSET, label=asset.name))
                    put_edge(chain.vulnerability_id, asset.id, EdgeRelation.TARGETS,
                             DEFAULT_EDGE_CONFIDENCE)

    for node_id in sorted(nodes):
        if nodes[node_id].kind is NodeKind.ASSET:
            for goal_id in goal_ids:
                put_edge(node_id, goal_id, EdgeRelation.LEADS_TO, DEFAULT_EDGE_CONFIDENCE)

    graph = CausalGraph(
        nodes=[nodes[nid] for nid in sorted(nodes)],
        edges=[edges[key] for key in sorted(edges)],
    )
    logger.info(
        "built graph for %s: %d nodes, %d edges, %d technique(s)",
        cti.campaign_id, len(graph.nodes), len(graph.edges), len(graph.technique_ids()),
    )
    return graph


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

def path_propensity(
    g: CausalGraph,
    path: Iterable[str],
    landscape: LandscapeInventory | None = None,
) -> float:
    """Confidence-sum proxy for how attractive a path is to the adversary.

    Each hop contributes confidence times applicability; a hop into an asset
    the landscape does not contain contributes nothing.
    """
    node_ids = list(path)
    if len(node_ids) < 2:
        raise InputValidationError(["a path needs at least two nodes"])
    asset_ids = landscape.asset_ids() if landscape is not None else None
    total = 0.0
    for source, target in zip(node_ids, node_ids[1:]):
        edge = g.edge_between(source, target)
        if edge is None:
            raise InputValidationError([f"no edge {source!r} -> {target!r} on path"])
        applicability = 1
        if g.nodes[target].kind is NodeKind.ASSET and asset_ids is not None and target not in asset_ids:
            applicability = 0
        total += edge.confidence * applicability
    return total


def enumerate_paths(
    g: CausalGraph,
    goal: str,
    max_depth: int = DEFAULT_MAX_DEPTH,
    landscape: LandscapeInventory | None = None,
) -> list[AttackPath]:
    """All simple technique-to-goal paths within the hop budget.

    Sorted by descending propensity, then by the node-id sequence, so the
    result is reproducible run to run.
    """
    if max_depth < 1:
        raise InputValidationError(["max_depth must be >= 1"])
    goal_node = g.nodes.get(goal)
    if goal_node is None or goal_node.kind is not NodeKind.GOAL:
        raise UnknownIdError(f"{goal!r} is not a goal node")

    found: list[tuple[str, ...]] = []

    def walk(current: str, trail: list[str], visited: set[str]) -> None:
        if current == goal:
            found.append(tuple(trail))
            return
        if len(trail) - 1 >= max_depth:
            return
        for succ in g.successors(current):
            if succ in visited:
                continue
            trail.append(succ)
            visited.add(succ)
            walk(succ, trail, visited)
            visited.discard(succ)
            trail.pop()

    for start in g.technique_ids():
        walk(start, [start], {start})

    paths = [
        AttackPath(nodes=nodes, propensity=path_propensity(g, nodes, landscape))
        for nodes in found
    ]
    paths.sort(key=lambda p: (-p.propensity, p.nodes))
    return paths


def detect_coverage(
    path: AttackPath | Iterable[str],
    entries: Iterable[MitigationEntry],
    matrix: ScoreMatrix | None = None,
    g: CausalGraph | None = None,
) -> float:
    """Sum of DETECT scores from entries covering the path's techniques."""
    matrix = matrix or default_matrix()
    node_ids = list(path.nodes if isinstance(path, AttackPath) else path)
    if g is not None:
        technique_ids = {nid for nid in node_ids if g.nodes[nid].kind in _TECHNIQUE_KINDS}
    else:
        technique_ids = set(node_ids)
    total = 0.0
    for entry in entries:
        if entry.criterion == "DETECT" and entry.ttp_id in technique_ids:
            total += matrix.score(entry.criterion, entry.level)
    return total


# ---------------------------------------------------------------------------
# triage
# ---------------------------------------------------------------------------

class TtpClass(str, Enum):
    PROBABLE = "probable"
    PLAUSIBLE = "plausible"
    POSSIBLE_ONLY = "possible_only"
    EXCLUDED = "excluded"


class Sphere(str, Enum):
    RISK = "risk"
    UNCERTAINTY = "uncertainty"


@dataclass(frozen=True)
class TtpClassification:
    ttp_id: str
    ttp_class: TtpClass
    sphere: Sphere
    rationale: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "ttp_id": self.ttp_id,
            "class": self.ttp_class.value,
            "sphere": self.sphere.value,
            "rationale": list(self.rationale),
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "TtpClassification":
        return cls(
            ttp_id=raw["ttp_id"],
            ttp_class=TtpClass(raw["class"]),
            sphere=Sphere(raw["sphere"]),
            rationale=tuple(raw.get("rationale", [])),
        )


def classify_ttps(
    g: CausalGraph,
    kb: KnowledgeBase,
    cti: CtiReport,
    landscape: LandscapeInventory,
    probable_threshold: int = DEFAULT_PROBABLE_THRESHOLD,
    adaptation_flags: Iterable[str] = (),
) -> list[TtpClassification]:
    """Assign each technique node exactly one class and sphere.

    Probable: platform-capable with evidence at or above the threshold.
    Plausible: capable, below the threshold, but tactically adjacent to a
    probable TTP or flagged by an analyst as a likely adaptation.
    Possible-only: capable with nothing further. Excluded: contradicted by
    the landscape, either listed by the analyst or lacking any platform
    overlap.
    """
    if not 1 <= probable_threshold <= 5:
        raise InputValidationError(["probable_threshold must be in 1..5"])
    flags = set(adaptation_flags) | set(cti.adaptation_flags)
    excluded_ids = {e.ttp_id for e in landscape.exclusions}

    evidence_by_ttp: dict[str, int] = {}
    for item in cti.evidence:
        evidence_by_ttp[item.ttp_id] = max(evidence_by_ttp.get(item.ttp_id, 0), item.evidence_level)

    def tactic_parents(ttp_id: str) -> set[str]:
        parents = {
            edge.target
            for edge in g.edges
            if edge.source == ttp_id and edge.relation is EdgeRelation.ACHIEVES
        }
        if parents:
            return parents
        record = kb.techniques.get(ttp_id)
        return set(record.tactic_ids) if record else set()

    def platform_capable(ttp_id: str) -> bool:
        record = kb.techniques.get(ttp_id)
        platforms = set(record.platforms) if record else set()
        return bool(platforms & landscape.platform_union())

    technique_ids = g.technique_ids()
    probable_ids = {
        tid for tid in technique_ids
        if tid not in excluded_ids
        and platform_capable(tid)
        and evidence_by_ttp.get(tid, 0) >= probable_threshold
    }
    probable_by_tactic: dict[str, str] = {}
    for pid in sorted(probable_ids):
        for tactic in tactic_parents(pid):
            probable_by_tactic.setdefault(tactic, pid)

    out: list[TtpClassification] = []
    for tid in technique_ids:
        if tid in excluded_ids:
            out.append(TtpClassification(tid, TtpClass.EXCLUDED, Sphere.UNCERTAINTY,
                                         ("landscape_exclusion",)))
            continue
        if not platform_capable(tid):
            out.append(TtpClassification(tid, TtpClass.EXCLUDED, Sphere.UNCERTAINTY,
                                         ("platform_mismatch",)))
            continue
        level = evidence_by_ttp.get(tid, 0)
        if tid in probable_ids:
            out.append(TtpClassification(tid, TtpClass.PROBABLE, Sphere.RISK,
                                         ("platform_match", f"evidence_level>={probable_threshold}")))
            continue
        sibling = min(
            (probable_by_tactic[t] for t in tactic_parents(tid) if t in probable_by_tactic),
            default=None,
        )
        if tid in flags:
            out.append(TtpClassification(tid, TtpClass.PLAUSIBLE, Sphere.UNCERTAINTY,
                                         ("platform_match", "analyst_adaptation_flag")))
        elif sibling is not None:
            out.append(TtpClassification(tid, TtpClass.PLAUSIBLE, Sphere.UNCERTAINTY,
                                         ("platform_match", f"shares_tactic_with:{sibling}")))
        else:
            out.append(TtpClassification(
                tid, TtpClass.POSSIBLE_ONLY, Sphere.UNCERTAINTY,
                ("platform_match", f"evidence_level<{probable_threshold}" if level else "no_evidence"),
            ))
    return out


# ---------------------------------------------------------------------------
# adversary behavior
# ---------------------------------------------------------------------------

def adversary_best_path(
    g: CausalGraph,
    classifications: Iterable[TtpClassification],
    entries: Iterable[MitigationEntry],
    *,
    landscape: LandscapeInventory | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    matrix: ScoreMatrix | None = None,
) -> AttackPath | None:
    """The path a rational adversary takes under the in-place controls.

    Viable paths run through probable or plausible techniques only and are
    not blocked by a high-strength prevent control. Medium and low prevent
    controls drain propensity by their score instead of blocking. Ties
    prefer the path that evades detection best, then the node sequence.
    """
    matrix = matrix or default_matrix()
    entry_rows = list(entries)
    class_by_ttp = {c.ttp_id: c.ttp_class for c in classifications}

    blocked: set[str] = set()
    prevent_drain: dict[str, float] = {}
    for entry in entry_rows:
        if entry.criterion != "PREVENT":
            continue
        if entry.level is EffectivenessLevel.HIGH:
            blocked.add(entry.ttp_id)
        else:
            score = matrix.score(entry.criterion, entry.level)
            prevent_drain[entry.ttp_id] = prevent_drain.get(entry.ttp_id, 0.0) + score

    candidates: list[tuple[float, float, AttackPath]] = []
    for goal_id in g.goal_ids():
        for path in enumerate_paths(g, goal_id, max_depth=max_depth, landscape=landscape):
            technique_ids = [nid for nid in path.nodes if g.nodes[nid].kind in _TECHNIQUE_KINDS]
            if any(class_by_ttp.get(tid) not in (TtpClass.PROBABLE, TtpClass.PLAUSIBLE)
                   for tid in technique_ids):
                continue
            if any(tid in blocked for tid in technique_ids):
                continue
            effective = path.propensity - sum(prevent_drain.get(tid, 0.0) for tid in technique_ids)
            coverage = detect_coverage(path, entry_rows, matrix, g)
            candidates.append((effective, coverage, path))

    if not candidates:
        return None
    candidates.sort(key=lambda item: (-item[0], item[1], item[2].nodes))
    effective, coverage, best = candidates[0]
    return AttackPath(
        nodes=best.nodes,
        propensity=effective,
        detect_coverage=coverage,
        viability=True,
    )


def impact_score(
    g: CausalGraph,
    path: AttackPath | None,
    aggregates: Mapping[str, Any] | None,
) -> float:
    """Recovery-time plus restore-cost means summed over path techniques."""
    if path is None or not aggregates:
        return 0.0
    total = 0.0
    for node_id in path.nodes:
        node = g.nodes.get(node_id)
        if node is None or node.kind not in _TECHNIQUE_KINDS:
            continue
        aggregate = aggregates.get(node_id)
        if aggregate is None:
            continue
        for criterion in IMPACT_CRITERIA:
            total += aggregate.means.get(criterion, 0.0)
    return total


@dataclass(frozen=True)
class ReplanResult:
    """Outcome of re-deriving the adversary's best path after a control change."""

    old_path: AttackPath | None
    new_path: AttackPath | None
    paradox: bool
    deltas: Mapping[str, float | None]

    def to_dict(self) -> dict[str, Any]:
        return {
            "old_path": self.old_path.to_dict() if self.old_path else None,
            "new_path": self.new_path.to_dict() if self.new_path else None,
            "paradox": self.paradox,
            "deltas": {k: self.deltas[k] for k in sorted(self.deltas)},
        }

    def canonical(self) -> str:
        return canonical_dumps(self.to_dict())


def replan_after_control(
    g: CausalGraph,
    classifications: Iterable[TtpClassification],
    entries_before: Iterable[MitigationEntry],
    entries_after: Iterable[MitigationEntry],
    *,
    landscape: LandscapeInventory | None = None,
    aggregates: Mapping[str, Any] | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    matrix: ScoreMatrix | None = None,
) -> ReplanResult:
    """Compare adversary behavior before and after a control change.

    The paradox flag fires when the switch leaves the defender worse off:
    the adversary still has a path and it is either less detectable than
    the old one was, or carries a higher impact.
    """
    matrix = matrix or default_matrix()
    classification_rows = list(classifications)
    before_rows = list(entries_before)
    after_rows = list(entries_after)
    old_path = adversary_best_path(
        g, classification_rows, before_rows,
        landscape=landscape, max_depth=max_depth, matrix=matrix,
    )
    new_path = adversary_best_path(
        g, classification_rows, after_rows,
        landscape=landscape, max_depth=max_depth, matrix=matrix,
    )

    old_impact = impact_score(g, old_path, aggregates)
    new_impact = impact_score(g, new_path, aggregates)

    paradox = False
    if new_path is not None and old_path is not None:
        paradox = new_path.detect_coverage < old_path.detect_coverage or new_impact > old_impact

    deltas: dict[str, float | None] = {
        "propensity": None, "detect_coverage": None, "impact": None,
    }
    if new_path is not None and old_path is not None:
        deltas["propensity"] = new_path.propensity - old_path.propensity
        deltas["detect_coverage"] = new_path.detect_coverage - old_path.detect_coverage
        deltas["impact"] = new_impact - old_impact
    return ReplanResult(old_path=old_path, new_path=new_path, paradox=paradox, deltas=deltas)


def path_from_dict(raw: dict[str, Any] | None) -> AttackPath | None:
    if raw is None:
        return None
    return AttackPath(
        nodes=tuple(raw["nodes"]),
        propensity=float(raw["propensity"]),
        detect_coverage=float(raw.get("detect_coverage", 0.0)),
        viability=bool(raw.get("viability", True)),
    )


def replan_from_dict(raw: dict[str, Any]) -> ReplanResult:
    return ReplanResult(
        old_path=path_from_dict(raw.get("old_path")),
        new_path=path_from_dict(raw.get("new_path")),
        paradox=bool(raw["paradox"]),
        deltas={k: (None if v is None else float(v)) for k, v in raw.get("deltas", {}).items()},
    )
