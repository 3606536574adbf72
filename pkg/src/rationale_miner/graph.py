"""The decision/rationale graph: nodes, links, scored edges, persistence.

Every extracted triple contributes one decision node and one rationale
node joined by an implicit has_rationale link (they share a sentence id).
Decision pairs may additionally carry Similar/Contradicts edges admitted
by thresholds. The graph persists as a single deterministic JSON document
and supports incremental insertion that scores a new decision against all
existing ones before committing anything.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .errors import GraphIntegrityError, SchemaVersionError
from .extraction import DRTriple
from .scoring import (
    CONTRADICTS,
    KINDS,
    SIMILAR,
    PairScorer,
    Thresholds,
    apply_threshold,
    score_pairs,
)

SCHEMA_VERSION = 1

DECISION_PREFIX = "D:"
RATIONALE_PREFIX = "R:"


@dataclass(frozen=True)
class DecisionNode:
    id: str
    text: str
    sentence_id: str
    commit_id: str

    def __post_init__(self):
        if self.id != DECISION_PREFIX + self.sentence_id:
            raise GraphIntegrityError(f"decision id {self.id!r} does not match sentence id {self.sentence_id!r}")
        if not self.text.strip():
            raise GraphIntegrityError(f"decision {self.id}: empty text")


@dataclass(frozen=True)
class RationaleNode:
    id: str
    text: str
    sentence_id: str
    commit_id: str

    def __post_init__(self):
        if self.id != RATIONALE_PREFIX + self.sentence_id:
            raise GraphIntegrityError(f"rationale id {self.id!r} does not match sentence id {self.sentence_id!r}")
        if not self.text.strip():
            raise GraphIntegrityError(f"rationale {self.id}: empty text")


@dataclass(frozen=True)
class RelEdge:
    a: str
    b: str
    kind: str
    score: float
    scorer_id: str

    def __post_init__(self):
        if self.a == self.b:
            raise GraphIntegrityError(f"self-edge on {self.a!r}")
        if self.a > self.b:
            raise GraphIntegrityError(f"edge endpoints not canonical: ({self.a!r}, {self.b!r})")
        if self.kind not in KINDS:
            raise GraphIntegrityError(f"unknown edge kind {self.kind!r}")
        if not 0.0 <= self.score <= 1.0:
            raise GraphIntegrityError(f"edge score out of [0,1]: {self.score}")


def build_timestamp() -> str:
    """ISO timestamp for graph metadata; honors SOURCE_DATE_EPOCH for
    reproducible builds."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(timezone.utc).isoformat()


class RationaleGraph:
    """Mutable in-memory graph with canonical-pair edge storage."""

    def __init__(self, meta: dict | None = None):
        self.decisions: dict[str, DecisionNode] = {}
        self.rationales: dict[str, RationaleNode] = {}
        self._edges: dict[tuple[str, str, str], RelEdge] = {}
        self.meta: dict = meta if meta is not None else {}

    # -- nodes ------------------------------------------------------------

    def has_sentence(self, sentence_id: str) -> bool:
        return DECISION_PREFIX + sentence_id in self.decisions

    def insert_triple_nodes(self, triple: DRTriple) -> tuple[DecisionNode, RationaleNode]:
        if self.has_sentence(triple.sentence_id):
            raise GraphIntegrityError(f"duplicate sentence id {triple.sentence_id!r}")
        decision = DecisionNode(
            id=DECISION_PREFIX + triple.sentence_id,
            text=triple.decision_text,
            sentence_id=triple.sentence_id,
            commit_id=triple.commit_id,
        )
        rationale = RationaleNode(
            id=RATIONALE_PREFIX + triple.sentence_id,
            text=triple.rationale_text,
            sentence_id=triple.sentence_id,
            commit_id=triple.commit_id,
        )
        self.decisions[decision.id] = decision
        self.rationales[rationale.id] = rationale
        return decision, rationale

    def rationale_for(self, decision_id: str) -> RationaleNode:
        decision = self.decisions[decision_id]
        return self.rationales[RATIONALE_PREFIX + decision.sentence_id]

    def decision_texts(self) -> dict[str, str]:
        return {node_id: node.text for node_id, node in self.decisions.items()}

    # -- edges ------------------------------------------------------------

    def add_edge(self, edge: RelEdge) -> None:
        for endpoint in (edge.a, edge.b):
            if endpoint not in self.decisions:
                raise GraphIntegrityError(f"edge endpoint {endpoint!r} is not a decision node")
        key = (edge.a, edge.b, edge.kind)
        if key in self._edges:
            raise GraphIntegrityError(f"duplicate edge ({edge.a!r}, {edge.b!r}, {edge.kind})")
        self._edges[key] = edge

    def edge(self, a: str, b: str, kind: str) -> RelEdge | None:
        """Edge lookup is order-insensitive: (a,b) and (b,a) hit the same edge."""
        if a > b:
            a, b = b, a
        return self._edges.get((a, b, kind))

    def edges(self, kind: str | None = None) -> list[RelEdge]:
        items = [e for e in self._edges.values() if kind is None or e.kind == kind]
        return sorted(items, key=lambda e: (e.a, e.b, e.kind))

    def neighbors(self, decision_id: str, kind: str) -> list[tuple[str, RelEdge]]:
        out = []
        for edge in self._edges.values():
            if edge.kind != kind:
                continue
            if edge.a == decision_id:
                out.append((edge.b, edge))
            elif edge.b == decision_id:
                out.append((edge.a, edge))
        return sorted(out, key=lambda pair: pair[0])

    def clear_edges(self, kind: str) -> None:
        self._edges = {key: e for key, e in self._edges.items() if e.kind != kind}

    def same_content(self, other: "RationaleGraph") -> bool:
        """Node/edge equality ignoring metadata."""
        return (
            self.decisions == other.decisions
            and self.rationales == other.rationales
            and self._edges == other._edges
        )


def build_graph(triples: Sequence[DRTriple], project: str = "", timestamp: str | None = None) -> RationaleGraph:
    """Populate a fresh graph with nodes and links only; no edges yet."""
    graph = RationaleGraph(
        meta={
            "project": project,
            "build_timestamp": timestamp if timestamp is not None else build_timestamp(),
            "thresholds": None,
            "scorer_ids": {},
        }
    )
    for triple in triples:
        graph.insert_triple_nodes(triple)
    return graph


def add_decision(
    graph: RationaleGraph,
    triple: DRTriple,
    similarity_scorer: PairScorer,
    contradiction_scorer: PairScorer,
    thresholds: Thresholds,
    batch_size: int = 2000,
) -> tuple[RationaleGraph, list[RelEdge]]:
    """Insert one new decision, scoring it against every existing decision.

    All scoring happens before any mutation, so a scorer failure leaves the
    graph untouched; the node pair and its admitted edges commit together.
    """
    if graph.has_sentence(triple.sentence_id):
        raise GraphIntegrityError(f"duplicate sentence id {triple.sentence_id!r}")

    new_id = DECISION_PREFIX + triple.sentence_id
    texts = graph.decision_texts()
    texts[new_id] = triple.decision_text
    pairs = [(new_id, existing) for existing in sorted(graph.decisions)]

    new_edges: list[RelEdge] = []
    for scorer, kind in ((similarity_scorer, SIMILAR), (contradiction_scorer, CONTRADICTS)):
        scores = score_pairs(scorer, texts, pairs, kind, batch_size=batch_size)
        new_edges.extend(apply_threshold(scores, thresholds.for_kind(kind)))

    graph.insert_triple_nodes(triple)
    for edge in new_edges:
        graph.add_edge(edge)
    return graph, sorted(new_edges, key=lambda e: (e.a, e.b, e.kind))


# --------------------------------------------------------------------------
# Persistence
# --------------------------------------------------------------------------

_TOP_KEYS = {"schema_version", "meta", "decisions", "rationales", "edges"}
_NODE_KEYS = {"id", "text", "sentence_id", "commit_id"}
_EDGE_KEYS = {"a", "b", "kind", "score", "scorer_id"}


def save(graph: RationaleGraph, path: str | Path) -> None:
    """Write the graph as deterministic JSON (sorted keys, sorted arrays)."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "meta": graph.meta,
        "decisions": [
            {"id": n.id, "text": n.text, "sentence_id": n.sentence_id, "commit_id": n.commit_id}
            for n in sorted(graph.decisions.values(), key=lambda n: n.id)
        ],
        "rationales": [
            {"id": n.id, "text": n.text, "sentence_id": n.sentence_id, "commit_id": n.commit_id}
            for n in sorted(graph.rationales.values(), key=lambda n: n.id)
        ],
        "edges": [
            {"a": e.a, "b": e.b, "kind": e.kind, "score": e.score, "scorer_id": e.scorer_id}
            for e in graph.edges()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _require_keys(record: dict, wanted: set[str], what: str) -> None:
    if set(record) != wanted:
        raise GraphIntegrityError(
            f"{what} has keys {sorted(record)}, expected {sorted(wanted)}"
        )


def load(path: str | Path) -> RationaleGraph:
    """Load and validate a persisted graph; violations are rejected, not repaired."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphIntegrityError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(payload, dict):
        raise GraphIntegrityError(f"{path}: top level is not an object")
    _require_keys(payload, _TOP_KEYS, "graph document")
    version = payload["schema_version"]
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
    if not isinstance(payload["meta"], dict):
        raise GraphIntegrityError("meta is not an object")

    graph = RationaleGraph(meta=payload["meta"])
    for record in payload["decisions"]:
        _require_keys(record, _NODE_KEYS, "decision node")
        node = DecisionNode(**record)
        if node.id in graph.decisions:
            raise GraphIntegrityError(f"duplicate decision id {node.id!r}")
        graph.decisions[node.id] = node
    for record in payload["rationales"]:
        _require_keys(record, _NODE_KEYS, "rationale node")
        node = RationaleNode(**record)
        if node.id in graph.rationales:
            raise GraphIntegrityError(f"duplicate rationale id {node.id!r}")
        graph.rationales[node.id] = node

    decision_sids = {n.sentence_id for n in graph.decisions.values()}
    rationale_sids = {n.sentence_id for n in graph.rationales.values()}
    if decision_sids != rationale_sids:
        odd = sorted(decision_sids ^ rationale_sids)
        raise GraphIntegrityError(f"decision/rationale link broken for sentence ids {odd[:5]}")

    for record in payload["edges"]:
        _require_keys(record, _EDGE_KEYS, "edge")
        edge = RelEdge(**record)
        graph.add_edge(edge)
    return graph


# --------------------------------------------------------------------------
# DOT export
# --------------------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(graph: RationaleGraph, path: str | Path) -> None:
    """Render the graph as DOT: boxes for decisions, ellipses for rationales,
    solid undirected-styled lines for Similar, dashed red for Contradicts."""
    lines = ["digraph rationale_graph {"]
    for node in sorted(graph.decisions.values(), key=lambda n: n.id):
        lines.append(f'  "{_dot_escape(node.id)}" [shape=box, label="{_dot_escape(node.text)}"];')
    for node in sorted(graph.rationales.values(), key=lambda n: n.id):
        lines.append(f'  "{_dot_escape(node.id)}" [shape=ellipse, label="{_dot_escape(node.text)}"];')
    for decision in sorted(graph.decisions.values(), key=lambda n: n.id):
        rationale = graph.rationale_for(decision.id)
        lines.append(f'  "{_dot_escape(decision.id)}" -> "{_dot_escape(rationale.id)}" [label="has_rationale"];')
    for edge in graph.edges():
        if edge.kind == SIMILAR:
            style = "dir=none, color=blue, style=solid"
        else:
            style = "dir=none, color=red, style=dashed"
        lines.append(
            f'  "{_dot_escape(edge.a)}" -> "{_dot_escape(edge.b)}" '
            f'[{style}, label="{edge.kind} {edge.score:.2f}"];'
        )
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
