"""Analyses over a scored graph: conflicts for new decisions, M1/M2 scans.

Two inconsistency mechanisms run over stored decision-decision edges,
scoring the linked rationale pair lazily:

* M1 - similar decisions whose rationales contradict each other
* M2 - contradictory decisions whose rationales are similar

The conflict check for a not-yet-inserted decision finds decisions that
contradict decisions similar to it (transitive findings) and decisions it
contradicts outright (direct findings). Both analyses examine stored
edges only; pairs already discarded by the admission threshold are not
re-examined, and reports carry a note saying so.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import GraphIntegrityError
from .extraction import DRTriple
from .graph import DECISION_PREFIX, RATIONALE_PREFIX, RationaleGraph, RelEdge
from .scoring import CONTRADICTS, SIMILAR, PairScorer, Thresholds, score_pairs

EDGE_SCOPE_NOTE = "analysis restricted to stored graph edges; pairs below the admission threshold are not re-examined"

M1 = "M1"
M2 = "M2"


@dataclass(frozen=True)
class ConflictFinding:
    """A conflict hit for a new decision; direct hits have no via decision."""

    new_decision: str
    via_decision: str | None
    conflicting_decision: str
    sim_score: float | None
    contra_score: float

    @property
    def direct(self) -> bool:
        return self.via_decision is None

    def validate(self) -> None:
        ids = {self.new_decision, self.conflicting_decision}
        if self.via_decision is not None:
            ids.add(self.via_decision)
            if self.sim_score is None:
                raise ValueError("transitive finding without a similarity score")
            expected = 3
        else:
            if self.sim_score is not None:
                raise ValueError("direct finding carrying a similarity score")
            expected = 2
        if len(ids) != expected:
            raise ValueError(f"finding ids are not distinct: {sorted(ids)}")
        for score in (self.sim_score, self.contra_score):
            if score is not None and not 0.0 <= score <= 1.0:
                raise ValueError(f"score out of [0,1]: {score}")

    def __post_init__(self):
        self.validate()

    def to_dict(self) -> dict:
        record: dict = {
            "new": self.new_decision,
            "via": self.via_decision,
            "conflicting": self.conflicting_decision,
            "contra_score": self.contra_score,
            "direct": self.direct,
        }
        if not self.direct:
            record["sim_score"] = self.sim_score
        return record


@dataclass(frozen=True)
class InconsistencyFinding:
    """One M1/M2 hit: a decision pair plus its scored rationale pair."""

    mechanism: str
    d1: str
    d2: str
    dd_score: float
    r1: str
    r2: str
    rr_score: float

    def validate(self) -> None:
        if self.mechanism not in (M1, M2):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if not self.d1 < self.d2:
            raise ValueError(f"decision pair not canonical: ({self.d1!r}, {self.d2!r})")
        for decision_id, rationale_id in ((self.d1, self.r1), (self.d2, self.r2)):
            if not decision_id.startswith(DECISION_PREFIX) or not rationale_id.startswith(RATIONALE_PREFIX):
                raise ValueError(f"bad node id prefixes: {decision_id!r}, {rationale_id!r}")
            if decision_id[len(DECISION_PREFIX) :] != rationale_id[len(RATIONALE_PREFIX) :]:
                raise ValueError(f"rationale {rationale_id!r} does not belong to {decision_id!r}")
        for score in (self.dd_score, self.rr_score):
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"score out of [0,1]: {score}")

    def __post_init__(self):
        self.validate()

    def dd_kind(self) -> str:
        return SIMILAR if self.mechanism == M1 else CONTRADICTS

    def rr_kind(self) -> str:
        return CONTRADICTS if self.mechanism == M1 else SIMILAR

    def to_dict(self, graph: RationaleGraph | None = None) -> dict:
        record: dict = {
            "mechanism": self.mechanism,
            "d1": self.d1,
            "d2": self.d2,
            "dd_score": self.dd_score,
            "r1": self.r1,
            "r2": self.r2,
            "rr_score": self.rr_score,
        }
        if graph is not None:
            record["texts"] = {
                self.d1: graph.decisions[self.d1].text,
                self.d2: graph.decisions[self.d2].text,
                self.r1: graph.rationales[self.r1].text,
                self.r2: graph.rationales[self.r2].text,
            }
        return record


# --------------------------------------------------------------------------
# Edge queries
# --------------------------------------------------------------------------


def find_similar(graph: RationaleGraph, threshold: float) -> list[RelEdge]:
    """Similar edges scoring at least the threshold, strongest first."""
    edges = [e for e in graph.edges(SIMILAR) if e.score >= threshold]
    return sorted(edges, key=lambda e: (-e.score, e.a, e.b))


def find_contradictions(graph: RationaleGraph, threshold: float) -> list[RelEdge]:
    """Contradicts edges scoring at least the threshold, strongest first."""
    edges = [e for e in graph.edges(CONTRADICTS) if e.score >= threshold]
    return sorted(edges, key=lambda e: (-e.score, e.a, e.b))


# --------------------------------------------------------------------------
# Conflict check for a new decision
# --------------------------------------------------------------------------


def check_conflicts(
    graph: RationaleGraph,
    new_decision: DRTriple,
    similarity_scorer: PairScorer,
    contradiction_scorer: PairScorer,
    thresholds: Thresholds,
    batch_size: int = 2000,
) -> list[ConflictFinding]:
    """Find stored decisions in conflict with a decision not yet inserted.

    Transitive findings chain a Similar hit (new vs stored) to a stored
    Contradicts edge; direct findings score the new decision against every
    stored one with the contradiction scorer. The graph is only read.
    """
    if graph.has_sentence(new_decision.sentence_id):
        raise GraphIntegrityError(f"decision {new_decision.sentence_id!r} is already in the graph")
    new_id = DECISION_PREFIX + new_decision.sentence_id
    existing = sorted(graph.decisions)
    if not existing:
        return []
    texts = graph.decision_texts()
    texts[new_id] = new_decision.decision_text
    pairs = [(new_id, other) for other in existing]

    sim_scores = score_pairs(similarity_scorer, texts, pairs, SIMILAR, batch_size=batch_size)
    contra_scores = score_pairs(contradiction_scorer, texts, pairs, CONTRADICTS, batch_size=batch_size)

    transitive: list[ConflictFinding] = []
    for other, scored in zip(existing, sim_scores):
        if scored.score < thresholds.dd_similar:
            continue
        for conflicting, edge in graph.neighbors(other, CONTRADICTS):
            if edge.score < thresholds.dd_contradicts or conflicting == new_id:
                continue
            transitive.append(
                ConflictFinding(
                    new_decision=new_id,
                    via_decision=other,
                    conflicting_decision=conflicting,
                    sim_score=scored.score,
                    contra_score=edge.score,
                )
            )
    direct: list[ConflictFinding] = []
    for other, scored in zip(existing, contra_scores):
        if scored.score >= thresholds.dd_contradicts:
            direct.append(
                ConflictFinding(
                    new_decision=new_id,
                    via_decision=None,
                    conflicting_decision=other,
                    sim_score=None,
                    contra_score=scored.score,
                )
            )
    transitive.sort(key=lambda f: (-(f.sim_score or 0.0), f.via_decision or "", f.conflicting_decision))
    direct.sort(key=lambda f: (-f.contra_score, f.conflicting_decision))
    return transitive + direct


# --------------------------------------------------------------------------
# Inconsistency mechanisms
# --------------------------------------------------------------------------


def _rationale_findings(
    graph: RationaleGraph,
    mechanism: str,
    edges: list[RelEdge],
    rationale_scorer: PairScorer,
    rr_threshold: float,
    rr_kind: str,
    batch_size: int,
) -> list[InconsistencyFinding]:
    if not edges:
        return []
    texts = {node_id: node.text for node_id, node in graph.rationales.items()}
    pairs = []
    for edge in edges:
        r1 = graph.rationale_for(edge.a).id
        r2 = graph.rationale_for(edge.b).id
        pairs.append((r1, r2))
    scores = score_pairs(rationale_scorer, texts, pairs, rr_kind, batch_size=batch_size)
    findings = []
    for edge, (r1, r2), scored in zip(edges, pairs, scores):
        if scored.score < rr_threshold:
            continue
        findings.append(
            InconsistencyFinding(
                mechanism=mechanism,
                d1=edge.a,
                d2=edge.b,
                dd_score=edge.score,
                r1=r1,
                r2=r2,
                rr_score=scored.score,
            )
        )
    return sort_findings(findings)


def detect_m1(
    graph: RationaleGraph,
    rationale_contradiction_scorer: PairScorer,
    thresholds: Thresholds,
    batch_size: int = 2000,
) -> list[InconsistencyFinding]:
    """Similar decision pairs whose rationales contradict each other."""
    edges = [e for e in graph.edges(SIMILAR) if e.score >= thresholds.dd_similar]
    return _rationale_findings(
        graph, M1, edges, rationale_contradiction_scorer, thresholds.rr, CONTRADICTS, batch_size
    )


def detect_m2(
    graph: RationaleGraph,
    rationale_similarity_scorer: PairScorer,
    thresholds: Thresholds,
    batch_size: int = 2000,
) -> list[InconsistencyFinding]:
    """Contradictory decision pairs whose rationales are similar."""
    edges = [e for e in graph.edges(CONTRADICTS) if e.score >= thresholds.dd_contradicts]
    return _rationale_findings(
        graph, M2, edges, rationale_similarity_scorer, thresholds.rr, SIMILAR, batch_size
    )


# --------------------------------------------------------------------------
# Report rendering
# --------------------------------------------------------------------------


def sort_findings(findings: Sequence[InconsistencyFinding]) -> list[InconsistencyFinding]:
    """Report order: mechanism, then strongest decision pair, then ids."""
    return sorted(findings, key=lambda f: (f.mechanism, -f.dd_score, f.d1, f.d2))


def render_report(
    findings: Sequence[InconsistencyFinding],
    format: str,
    path: str | Path,
    graph: RationaleGraph | None = None,
) -> None:
    """Write inconsistency findings as json, markdown, or csv.

    Ordering is deterministic and every finding is re-validated before it
    is written. Markdown lays each finding out as one row of decision and
    rationale texts plus the two relation cells, which needs the graph.
    """
    for finding in findings:
        finding.validate()
    ordered = sort_findings(findings)
    path = Path(path)
    if format == "json":
        payload = {
            "note": EDGE_SCOPE_NOTE,
            "findings": [f.to_dict(graph) for f in ordered],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mechanism", "d1", "d2", "dd_score", "r1", "r2", "rr_score"])
            for f in ordered:
                writer.writerow([f.mechanism, f.d1, f.d2, f.dd_score, f.r1, f.r2, f.rr_score])
    elif format == "markdown":
        if graph is None:
            raise ValueError("markdown rendering needs the graph for node texts")
        lines = [
            "# Inconsistency findings",
            "",
            f"Note: {EDGE_SCOPE_NOTE}.",
            "",
            "| Mechanism | D1 | R1 | D2 | R2 | D/D relation | R/R relation |",
            "| --- | --- | --- | --- | --- | --- | --- |",
        ]
        for f in ordered:
            cells = [
                f.mechanism,
                _md_escape(graph.decisions[f.d1].text),
                _md_escape(graph.rationales[f.r1].text),
                _md_escape(graph.decisions[f.d2].text),
                _md_escape(graph.rationales[f.r2].text),
                f"{f.dd_kind()} ({f.dd_score:.2f})",
                f"{f.rr_kind()} ({f.rr_score:.2f})",
            ]
            lines.append("| " + " | ".join(cells) + " |")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown report format {format!r}")


def render_conflicts(
    findings: Sequence[ConflictFinding],
    format: str,
    path: str | Path,
    graph: RationaleGraph | None = None,
) -> None:
    """Write conflict findings as json or markdown (csv mirrors the json keys)."""
    for finding in findings:
        finding.validate()
    path = Path(path)
    if format == "json":
        payload = {"note": EDGE_SCOPE_NOTE, "findings": [f.to_dict() for f in findings]}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["new", "via", "conflicting", "sim_score", "contra_score", "direct"])
            for f in findings:
                writer.writerow(
                    [
                        f.new_decision,
                        f.via_decision or "",
                        f.conflicting_decision,
                        "" if f.sim_score is None else f.sim_score,
                        f.contra_score,
                        str(f.direct).lower(),
                    ]
                )
    elif format == "markdown":
        lines = [
            "# Conflict findings",
            "",
            f"Note: {EDGE_SCOPE_NOTE}.",
            "",
            "| New | Via | Conflicting | Similarity | Contradiction | Direct |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        for f in findings:
            lines.append(
                "| "
                + " | ".join(
                    [
                        f.new_decision,
                        f.via_decision or "-",
                        f.conflicting_decision,
                        "-" if f.sim_score is None else f"{f.sim_score:.2f}",
                        f"{f.contra_score:.2f}",
                        "yes" if f.direct else "no",
                    ]
                )
                + " |"
            )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown report format {format!r}")


def _md_escape(text: str) -> str:
    return text.replace("|", "\\|")
