"""Tests for pair enumeration, batched scoring, checkpoints and baselines."""

from __future__ import annotations

import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rationale_miner.errors import FormatError, ScorerProtocolError
from rationale_miner.graph import RelEdge
from rationale_miner.scoring import (
    CONTRADICTS,
    DEFAULT_BATCH_SIZE,
    KINDS,
    SIMILAR,
    BaselineScorer,
    PairScore,
    Thresholds,
    apply_threshold,
    baseline_contradiction,
    baseline_similarity,
    enumerate_pairs,
    preset_thresholds,
    score_pairs,
    stopwords,
    write_raw_scores,
)


# ---------------------------------------------------------------------------
# enumerate_pairs
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n,count", [(0, 0), (1, 0), (2, 1), (3, 3), (527, 138601)])
def test_pair_counts(n, count):
    got, _ = enumerate_pairs(n)
    assert got == count


def test_pair_generator_matches_count_and_order():
    count, pairs = enumerate_pairs(6)
    listed = list(pairs)
    assert len(listed) == count
    assert listed == [(i, j) for i in range(6) for j in range(i + 1, 6)]
    assert all(i < j for i, j in listed)


def test_enumerate_rejects_negative():
    with pytest.raises(ValueError):
        enumerate_pairs(-1)


@given(st.integers(min_value=0, max_value=2000))
@settings(max_examples=80)
def test_pair_count_formula(n):
    count, _ = enumerate_pairs(n)
    assert count == n * (n - 1) // 2


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def test_default_thresholds():
    t = Thresholds()
    assert (t.dd_similar, t.dd_contradicts, t.rr) == (0.9, 0.9, 0.6)
    assert t.for_kind(SIMILAR) == 0.9
    assert t.for_kind(CONTRADICTS) == 0.9


def test_presets():
    oom = preset_thresholds("oom")
    assert (oom.dd_similar, oom.dd_contradicts, oom.rr) == (0.9, 0.9, 0.6)
    gen = preset_thresholds("generalization")
    assert (gen.dd_similar, gen.dd_contradicts, gen.rr) == (0.8, 0.8, 0.6)
    with pytest.raises(ValueError):
        preset_thresholds("strict")


@pytest.mark.parametrize("value", [0.0, -0.1, 1.2])
def test_thresholds_reject_out_of_range(value):
    with pytest.raises(ValueError):
        Thresholds(dd_similar=value)


def test_pair_score_validation():
    with pytest.raises(ValueError):
        PairScore(a="b", b="a", kind=SIMILAR, score=0.5, scorer_id="t")
    with pytest.raises(ValueError):
        PairScore(a="a", b="b", kind="Equals", score=0.5, scorer_id="t")
    with pytest.raises(ValueError):
        PairScore(a="a", b="b", kind=SIMILAR, score=1.5, scorer_id="t")


# ---------------------------------------------------------------------------
# baseline similarity
# ---------------------------------------------------------------------------


def test_similarity_identical_is_exactly_one():
    assert baseline_similarity("add lock", "add lock") == 1.0
    assert baseline_similarity("Add Lock", "add   lock!") == 1.0


def test_similarity_hand_computed_cosine():
    # vectors (1,1,0) and (1,1,1): dot 2, norms sqrt(2)*sqrt(3)
    value = baseline_similarity("add lock", "add lock now")
    assert math.isclose(value, 2 / math.sqrt(6), abs_tol=1e-12)


def test_similarity_disjoint_and_empty():
    assert baseline_similarity("add lock", "remove flag") == 0.0
    assert baseline_similarity("add lock", "") == 0.0
    assert baseline_similarity("", "") == 1.0
    assert baseline_similarity("!!!", "???") == 1.0


def test_similarity_repeated_tokens():
    # (2,) vs (1,): cosine of parallel one-dimensional vectors is 1.
    assert baseline_similarity("lock lock", "lock") == pytest.approx(1.0, abs=1e-12)


@given(st.text(max_size=60), st.text(max_size=60))
@settings(max_examples=200)
def test_similarity_symmetric_and_bounded(a, b):
    ab = baseline_similarity(a, b)
    assert 0.0 <= ab <= 1.0
    assert ab == baseline_similarity(b, a)
    assert baseline_similarity(a, a) == 1.0


# ---------------------------------------------------------------------------
# baseline contradiction
# ---------------------------------------------------------------------------


def test_contradiction_antonym_with_shared_context():
    assert baseline_contradiction("add the helper", "remove the helper") == 0.95


def test_contradiction_shared_content_without_antonyms():
    assert baseline_contradiction("resize the hash table", "rebuild the hash table") == 0.5


def test_contradiction_unrelated():
    assert baseline_contradiction("add a lock", "update docs") == 0.0


def test_contradiction_antonym_without_shared_context_is_weaker():
    # Antonym pair present but only one shared token ("the"): the strong
    # rule needs two shared tokens.
    value = baseline_contradiction("add the mutex", "remove the hook")
    assert value < 0.95


def test_contradiction_stopword_only_overlap_is_zero():
    assert baseline_contradiction("prefer the first of these", "under the same and that") == 0.0


def test_contradiction_antonyms_count_stopword_context():
    # Shared tokens {the, counter} include a stopword; the antonym rule
    # counts them anyway.
    assert baseline_contradiction("add the counter", "delete the counter") == 0.95


@given(st.text(max_size=60), st.text(max_size=60))
@settings(max_examples=200)
def test_contradiction_symmetric_and_quantized(a, b):
    ab = baseline_contradiction(a, b)
    assert ab in (0.0, 0.5, 0.95)
    assert ab == baseline_contradiction(b, a)


def test_stopword_list_is_fixed():
    words = stopwords()
    assert len(words) == 50
    assert "the" in words and "because" not in words


# ---------------------------------------------------------------------------
# score_pairs
# ---------------------------------------------------------------------------


class CountingScorer:
    """Deterministic scorer that records batch calls; optionally fails."""

    scorer_id = "counting"

    def __init__(self, fail_after: int | None = None):
        self.batches = 0
        self.pairs_seen = 0
        self.fail_after = fail_after

    def score_batch(self, kind, pairs):
        if self.fail_after is not None and self.batches >= self.fail_after:
            raise RuntimeError("simulated crash")
        self.batches += 1
        self.pairs_seen += len(pairs)
        if kind == SIMILAR:
            return [baseline_similarity(a, b) for a, b in pairs]
        return [baseline_contradiction(a, b) for a, b in pairs]


def _texts(n: int) -> dict[str, str]:
    verbs = ["add", "remove", "lock", "unlock", "set", "clear"]
    nouns = ["buffer", "flag", "counter", "path", "cache"]
    return {
        f"D:s{i:02d}": f"{verbs[i % len(verbs)]} the {nouns[i % len(nouns)]} {nouns[(i // 2) % len(nouns)]}"
        for i in range(n)
    }


def _pairs(texts: dict[str, str]) -> list[tuple[str, str]]:
    return list(itertools.combinations(sorted(texts), 2))


def test_score_pairs_matches_brute_force_oracle():
    texts = _texts(30)
    pairs = _pairs(texts)
    assert len(pairs) == 435
    scores = score_pairs(BaselineScorer(), texts, pairs, SIMILAR)
    assert len(scores) == 435
    for (a, b), item in zip(pairs, scores):
        assert (item.a, item.b) == (a, b)
        assert item.score == baseline_similarity(texts[a], texts[b])
        assert item.kind == SIMILAR


def test_score_pairs_batch_size_invariance():
    texts = _texts(30)
    pairs = _pairs(texts)
    one = score_pairs(BaselineScorer(), texts, pairs, CONTRADICTS, batch_size=1)
    big = score_pairs(BaselineScorer(), texts, pairs, CONTRADICTS, batch_size=DEFAULT_BATCH_SIZE)
    seven = score_pairs(BaselineScorer(), texts, pairs, CONTRADICTS, batch_size=7)
    assert one == big == seven


def test_score_pairs_canonicalizes_input_order():
    texts = _texts(4)
    ids = sorted(texts)
    scores = score_pairs(BaselineScorer(), texts, [(ids[2], ids[0])], SIMILAR)
    assert (scores[0].a, scores[0].b) == (ids[0], ids[2])


def test_score_pairs_rejects_self_pair_and_unknown_id():
    texts = _texts(3)
    ids = sorted(texts)
    with pytest.raises(ValueError, match="self-pair"):
        score_pairs(BaselineScorer(), texts, [(ids[0], ids[0])], SIMILAR)
    with pytest.raises(ValueError, match="resolvable"):
        score_pairs(BaselineScorer(), texts, [(ids[0], "D:ghost")], SIMILAR)


def test_score_pairs_rejects_unknown_kind():
    with pytest.raises(ValueError):
        score_pairs(BaselineScorer(), {}, [], "Equals")


def test_scorer_wrong_count_is_protocol_error():
    class ShortScorer:
        scorer_id = "short"

        def score_batch(self, kind, pairs):
            return [0.5] * (len(pairs) - 1)

    texts = _texts(3)
    with pytest.raises(ScorerProtocolError, match="short"):
        score_pairs(ShortScorer(), texts, _pairs(texts), SIMILAR)


def test_scorer_out_of_range_names_the_pair():
    class WildScorer:
        scorer_id = "wild"

        def score_batch(self, kind, pairs):
            return [1.5] * len(pairs)

    texts = _texts(3)
    ids = sorted(texts)
    with pytest.raises(ScorerProtocolError) as err:
        score_pairs(WildScorer(), texts, [(ids[0], ids[1])], SIMILAR)
    assert ids[0] in str(err.value) and ids[1] in str(err.value)


def test_scorer_non_numeric_score_is_protocol_error():
    class NoneScorer:
        scorer_id = "none"

        def score_batch(self, kind, pairs):
            return [None] * len(pairs)

    texts = _texts(3)
    with pytest.raises(ScorerProtocolError):
        score_pairs(NoneScorer(), texts, _pairs(texts), SIMILAR)


# ---------------------------------------------------------------------------
# checkpoint/resume
# ---------------------------------------------------------------------------


def test_checkpoint_resume_after_crash(tmp_path):
    texts = _texts(20)
    pairs = _pairs(texts)  # 190 pairs -> 19 batches of 10
    checkpoint = tmp_path / "run.checkpoint.json"

    crasher = CountingScorer(fail_after=7)
    with pytest.raises(RuntimeError):
        score_pairs(crasher, texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)
    assert checkpoint.exists()
    meta = json.loads(checkpoint.read_text())
    assert meta["completed_batches"] == list(range(7))
    assert meta["total_pairs"] == 190

    resumer = CountingScorer()
    scores = score_pairs(resumer, texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)
    # Only the 12 unfinished batches are re-scored.
    assert resumer.batches == 12
    assert resumer.pairs_seen == 120

    fresh = score_pairs(BaselineScorer(), texts, pairs, SIMILAR, batch_size=10)
    assert [(s.a, s.b, s.score) for s in scores] == [(s.a, s.b, s.score) for s in fresh]
    # Checkpoint files are cleaned up after a completed run.
    assert not checkpoint.exists()
    assert not (tmp_path / "run.checkpoint.json.scores.jsonl").exists()


def test_checkpoint_scores_persist_before_meta(tmp_path):
    texts = _texts(10)
    pairs = _pairs(texts)  # 45 pairs
    checkpoint = tmp_path / "run.checkpoint.json"
    crasher = CountingScorer(fail_after=2)
    with pytest.raises(RuntimeError):
        score_pairs(crasher, texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)
    stored = [
        json.loads(line)
        for line in (tmp_path / "run.checkpoint.json.scores.jsonl").read_text().splitlines()
    ]
    completed = json.loads(checkpoint.read_text())["completed_batches"]
    # every batch recorded complete has all its scores on disk
    assert len(stored) >= len(completed) * 10


def test_checkpoint_batch_size_mismatch_is_rejected(tmp_path):
    texts = _texts(10)
    pairs = _pairs(texts)
    checkpoint = tmp_path / "run.checkpoint.json"
    crasher = CountingScorer(fail_after=1)
    with pytest.raises(RuntimeError):
        score_pairs(crasher, texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)
    with pytest.raises(FormatError, match="batch_size"):
        score_pairs(BaselineScorer(), texts, pairs, SIMILAR, batch_size=5, checkpoint_path=checkpoint)


def test_checkpoint_missing_stored_score_is_rejected(tmp_path):
    texts = _texts(10)
    pairs = _pairs(texts)
    checkpoint = tmp_path / "run.checkpoint.json"
    checkpoint.write_text(
        json.dumps({"completed_batches": [0], "batch_size": 10, "total_pairs": len(pairs)})
    )
    # No companion scores file: batch 0 claims completion without data.
    with pytest.raises(FormatError, match="no stored score"):
        score_pairs(BaselineScorer(), texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)


def test_checkpoint_kind_mismatch_is_rejected(tmp_path):
    texts = _texts(10)
    pairs = _pairs(texts)
    checkpoint = tmp_path / "run.checkpoint.json"
    crasher = CountingScorer(fail_after=1)
    with pytest.raises(RuntimeError):
        score_pairs(crasher, texts, pairs, SIMILAR, batch_size=10, checkpoint_path=checkpoint)
    with pytest.raises(FormatError, match="kind"):
        score_pairs(BaselineScorer(), texts, pairs, CONTRADICTS, batch_size=10, checkpoint_path=checkpoint)


# ---------------------------------------------------------------------------
# apply_threshold
# ---------------------------------------------------------------------------


def _score(a: str, b: str, value: float, kind: str = SIMILAR) -> PairScore:
    return PairScore(a=a, b=b, kind=kind, score=value, scorer_id="t")


def test_apply_threshold_keeps_at_and_above():
    scores = [_score("a", "b", 0.95), _score("a", "c", 0.9), _score("b", "c", 0.89)]
    edges = apply_threshold(scores, 0.9)
    assert [(e.a, e.b) for e in edges] == [("a", "b"), ("a", "c")]
    assert all(isinstance(e, RelEdge) for e in edges)


def test_apply_threshold_sorts_output():
    scores = [_score("b", "c", 0.99), _score("a", "b", 0.91)]
    edges = apply_threshold(scores, 0.9)
    assert [(e.a, e.b) for e in edges] == [("a", "b"), ("b", "c")]


def test_apply_threshold_rejects_bad_threshold():
    with pytest.raises(ValueError):
        apply_threshold([], 0.0)
    with pytest.raises(ValueError):
        apply_threshold([], 1.0001)


@given(
    st.lists(
        st.tuples(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=20), st.floats(min_value=0.0, max_value=1.0)),
        max_size=40,
    ),
    st.floats(min_value=0.01, max_value=1.0),
    st.floats(min_value=0.01, max_value=1.0),
)
@settings(max_examples=100)
def test_threshold_monotonicity(raw, t1, t2):
    scores = []
    seen = set()
    for i, j, value in raw:
        if i == j:
            continue
        a, b = f"n{min(i, j):02d}", f"n{max(i, j):02d}"
        if (a, b) in seen:
            continue
        seen.add((a, b))
        scores.append(_score(a, b, value))
    low, high = min(t1, t2), max(t1, t2)
    kept_low = {(e.a, e.b) for e in apply_threshold(scores, low)}
    kept_high = {(e.a, e.b) for e in apply_threshold(scores, high)}
    assert kept_high <= kept_low


# ---------------------------------------------------------------------------
# raw score persistence / BaselineScorer
# ---------------------------------------------------------------------------


def test_write_raw_scores(tmp_path):
    path = tmp_path / "scores.jsonl"
    write_raw_scores([_score("a", "b", 0.5, CONTRADICTS)], path)
    record = json.loads(path.read_text().splitlines()[0])
    assert record == {"a": "a", "b": "b", "kind": "Contradicts", "score": 0.5, "scorer_id": "t"}


def test_baseline_scorer_dispatches_kind():
    scorer = BaselineScorer()
    assert scorer.scorer_id == "baseline-lexical"
    sims = scorer.score_batch(SIMILAR, [("add lock", "add lock")])
    cons = scorer.score_batch(CONTRADICTS, [("add the helper", "remove the helper")])
    assert sims == [1.0]
    assert cons == [0.95]
    with pytest.raises(ValueError):
        scorer.score_batch("Equals", [("a", "b")])


def test_kinds_constant():
    assert KINDS == (SIMILAR, CONTRADICTS)
