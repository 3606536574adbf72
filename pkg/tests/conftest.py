"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from rationale_miner.extraction import DRTriple
from rationale_miner.graph import RationaleGraph, build_graph
from rationale_miner.scoring import (
    CONTRADICTS,
    SIMILAR,
    BaselineScorer,
    Thresholds,
    apply_threshold,
    enumerate_pairs,
    score_pairs,
)

GOLDEN_DIR = Path(__file__).parent / "golden"
EXPECTED_DIR = GOLDEN_DIR / "expected"
DATA_DIR = Path(__file__).parent / "data"


# Small word pools that collide often enough to produce edges and antonym
# hits in randomly generated graphs.
_VERBS = ["add", "remove", "delete", "enable", "disable", "lock", "unlock", "set", "clear", "use", "drop", "start", "stop"]
_NOUNS = ["lock", "buffer", "counter", "path", "flag", "cache", "queue", "limit", "timer", "page"]
_TAILS = ["early", "late", "now", "again", "once"]


def random_triple(rng: random.Random, index: int) -> DRTriple:
    verb = rng.choice(_VERBS)
    noun1 = rng.choice(_NOUNS)
    noun2 = rng.choice(_NOUNS)
    decision = f"{verb} the {noun1} {noun2}"
    rverb = rng.choice(_VERBS)
    rnoun = rng.choice(_NOUNS)
    tail = rng.choice(_TAILS)
    rationale = f"because the {rnoun} must {rverb} {tail}"
    return DRTriple(
        sentence_id=f"s{index:03d}#0",
        commit_id=f"s{index:03d}",
        decision_text=decision,
        rationale_text=rationale,
        extractor_id="test",
    )


def random_triples(rng: random.Random, n: int) -> list[DRTriple]:
    return [random_triple(rng, i) for i in range(n)]


def score_graph(graph: RationaleGraph, thresholds: Thresholds, batch_size: int = 2000) -> None:
    """Full-batch scoring of every decision pair, mirroring the score command."""
    scorer = BaselineScorer()
    texts = graph.decision_texts()
    ids = sorted(texts)
    _, index_pairs = enumerate_pairs(len(ids))
    pairs = [(ids[i], ids[j]) for i, j in index_pairs]
    for kind in (SIMILAR, CONTRADICTS):
        scores = score_pairs(scorer, texts, pairs, kind, batch_size=batch_size)
        for edge in apply_threshold(scores, thresholds.for_kind(kind)):
            graph.add_edge(edge)


def build_scored_graph(triples, thresholds: Thresholds) -> RationaleGraph:
    graph = build_graph(triples, project="test", timestamp="1970-01-01T00:00:00+00:00")
    score_graph(graph, thresholds)
    return graph


def finding_tuples(findings) -> set[tuple]:
    return {
        (f.mechanism, f.d1, f.d2, f.dd_score, f.r1, f.r2, f.rr_score) for f in findings
    }


def brute_force_m1(graph: RationaleGraph, thresholds: Thresholds) -> set[tuple]:
    """All-pairs reference for M1: rescan every decision pair from node texts,
    never consulting stored edges or the detector."""
    from rationale_miner.scoring import baseline_contradiction, baseline_similarity

    ids = sorted(graph.decisions)
    out = set()
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = ids[i], ids[j]
            sim = baseline_similarity(graph.decisions[a].text, graph.decisions[b].text)
            if sim < thresholds.dd_similar:
                continue
            ra, rb = graph.rationale_for(a), graph.rationale_for(b)
            contra = baseline_contradiction(ra.text, rb.text)
            if contra < thresholds.rr:
                continue
            out.add(("M1", a, b, sim, ra.id, rb.id, contra))
    return out


def brute_force_m2(graph: RationaleGraph, thresholds: Thresholds) -> set[tuple]:
    """All-pairs reference for M2, mirroring brute_force_m1."""
    from rationale_miner.scoring import baseline_contradiction, baseline_similarity

    ids = sorted(graph.decisions)
    out = set()
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = ids[i], ids[j]
            contra = baseline_contradiction(graph.decisions[a].text, graph.decisions[b].text)
            if contra < thresholds.dd_contradicts:
                continue
            ra, rb = graph.rationale_for(a), graph.rationale_for(b)
            sim = baseline_similarity(ra.text, rb.text)
            if sim < thresholds.rr:
                continue
            out.add(("M2", a, b, contra, ra.id, rb.id, sim))
    return out


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture
def expected_dir() -> Path:
    return EXPECTED_DIR


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
