"""Pairwise decision scoring: enumeration, batching, thresholds, baselines.

The O(n^2) pair space is enumerated once, scored through a pluggable
scorer in fixed-size batches (resumable via a checkpoint file for long
runs), and thresholded into relationship edges. The built-in baseline
scorers are deterministic lexical stand-ins for embedding and NLI models:
token-count cosine for similarity, a shared-token/antonym rule for
contradiction.
"""

from __future__ import annotations

import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Protocol, Sequence

from .errors import FormatError, ScorerProtocolError

if TYPE_CHECKING:
    from .graph import RelEdge

SIMILAR = "Similar"
CONTRADICTS = "Contradicts"
KINDS = (SIMILAR, CONTRADICTS)

DEFAULT_BATCH_SIZE = 2000

_WORD_RE = re.compile(r"[a-z0-9]+")

# Antonym verb pairs for the baseline contradiction rule.
_ANTONYMS = (
    ("add", "remove"),
    ("add", "delete"),
    ("enable", "disable"),
    ("lock", "unlock"),
    ("increase", "decrease"),
    ("set", "clear"),
    ("start", "stop"),
    ("push", "pop"),
)


@dataclass(frozen=True)
class PairScore:
    a: str
    b: str
    kind: str
    score: float
    scorer_id: str

    def __post_init__(self):
        if self.a >= self.b:
            raise ValueError(f"pair not canonical: ({self.a!r}, {self.b!r})")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of [0,1]: {self.score}")


@dataclass(frozen=True)
class Thresholds:
    """Admission thresholds: decision-decision per kind, rationale-rationale."""

    dd_similar: float = 0.9
    dd_contradicts: float = 0.9
    rr: float = 0.6

    def __post_init__(self):
        for name in ("dd_similar", "dd_contradicts", "rr"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must be in (0,1], got {value}")

    def for_kind(self, kind: str) -> float:
        return {SIMILAR: self.dd_similar, CONTRADICTS: self.dd_contradicts}[kind]

    def to_dict(self) -> dict:
        return {"dd_similar": self.dd_similar, "dd_contradicts": self.dd_contradicts, "rr": self.rr}


PRESETS = {
    "oom": Thresholds(dd_similar=0.9, dd_contradicts=0.9, rr=0.6),
    "generalization": Thresholds(dd_similar=0.8, dd_contradicts=0.8, rr=0.6),
}


def preset_thresholds(name: str) -> Thresholds:
    if name not in PRESETS:
        raise ValueError(f"unknown thresholds preset {name!r} (have: {', '.join(sorted(PRESETS))})")
    return PRESETS[name]


def enumerate_pairs(n: int) -> tuple[int, Iterator[tuple[int, int]]]:
    """Count and lazily yield all unordered index pairs i < j over range(n)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    count = n * (n - 1) // 2

    def pairs() -> Iterator[tuple[int, int]]:
        for i in range(n):
            for j in range(i + 1, n):
                yield (i, j)

    return count, pairs()


class PairScorer(Protocol):
    scorer_id: str

    def score_batch(self, kind: str, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


# --------------------------------------------------------------------------
# Batched scoring with checkpoint/resume
# --------------------------------------------------------------------------


def _checkpoint_scores_path(checkpoint_path: Path) -> Path:
    return Path(str(checkpoint_path) + ".scores.jsonl")


def _load_checkpoint(
    checkpoint_path: Path, kind: str, batch_size: int, total_pairs: int
) -> tuple[set[int], dict[tuple[str, str], float]]:
    with open(checkpoint_path, encoding="utf-8") as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid checkpoint JSON ({exc.msg})", path=checkpoint_path) from exc
    for key, expected in (("batch_size", batch_size), ("total_pairs", total_pairs)):
        if meta.get(key) != expected:
            raise FormatError(
                f"checkpoint does not match this run: {key} is {meta.get(key)!r}, expected {expected}",
                path=checkpoint_path,
            )
    completed = set(meta.get("completed_batches", []))
    scores: dict[tuple[str, str], float] = {}
    scores_path = _checkpoint_scores_path(checkpoint_path)
    if scores_path.exists():
        with open(scores_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"invalid JSON ({exc.msg})", path=scores_path, line=lineno) from exc
                if record.get("kind") != kind:
                    raise FormatError(
                        f"checkpoint kind {record.get('kind')!r} does not match {kind!r}",
                        path=scores_path,
                        line=lineno,
                    )
                scores[(record["a"], record["b"])] = record["score"]
    return completed, scores


def _write_checkpoint_meta(checkpoint_path: Path, completed: set[int], batch_size: int, total_pairs: int) -> None:
    payload = {
        "completed_batches": sorted(completed),
        "batch_size": batch_size,
        "total_pairs": total_pairs,
    }
    tmp = checkpoint_path.with_suffix(checkpoint_path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, checkpoint_path)


def _append_scores(path: Path, batch: Sequence[PairScore]) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for item in batch:
            fh.write(
                json.dumps(
                    {"a": item.a, "b": item.b, "kind": item.kind, "score": item.score, "scorer_id": item.scorer_id},
                    sort_keys=True,
                )
                + "\n"
            )
        fh.flush()
        os.fsync(fh.fileno())


def score_pairs(
    scorer: PairScorer,
    texts: Mapping[str, str],
    pairs: Iterable[tuple[str, str]],
    kind: str,
    batch_size: int = DEFAULT_BATCH_SIZE,
    checkpoint_path: str | Path | None = None,
) -> list[PairScore]:
    """Score id pairs in batches; one PairScore per pair, input order.

    The result is independent of batch size. With a checkpoint path, every
    completed batch is persisted (scores first, then the meta record), so
    an interrupted run resumes where it left off; the checkpoint files are
    removed once all batches finish.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")

    pair_list: list[tuple[str, str]] = []
    for a, b in pairs:
        if a == b:
            raise ValueError(f"self-pair not allowed: {a!r}")
        if b < a:
            a, b = b, a
        for node_id in (a, b):
            if node_id not in texts:
                raise ValueError(f"pair id not resolvable to a text: {node_id!r}")
        pair_list.append((a, b))

    total = len(pair_list)
    n_batches = (total + batch_size - 1) // batch_size

    completed: set[int] = set()
    restored: dict[tuple[str, str], float] = {}
    checkpoint = Path(checkpoint_path) if checkpoint_path is not None else None
    if checkpoint is not None and checkpoint.exists():
        completed, restored = _load_checkpoint(checkpoint, kind, batch_size, total)

    results: dict[int, PairScore] = {}
    for index in sorted(completed):
        for offset in range(index * batch_size, min((index + 1) * batch_size, total)):
            pair = pair_list[offset]
            if pair not in restored:
                raise FormatError(
                    f"checkpoint marks batch {index} complete but pair {pair} has no stored score",
                    path=checkpoint,
                )
            results[offset] = PairScore(
                a=pair[0], b=pair[1], kind=kind, score=restored[pair], scorer_id=scorer.scorer_id
            )

    for index in range(n_batches):
        if index in completed:
            continue
        start = index * batch_size
        chunk = pair_list[start : start + batch_size]
        replies = scorer.score_batch(kind, [(texts[a], texts[b]) for a, b in chunk])
        if len(replies) != len(chunk):
            raise ScorerProtocolError(
                f"scorer {scorer.scorer_id} returned {len(replies)} scores for {len(chunk)} pairs"
            )
        batch_scores = []
        for (a, b), score in zip(chunk, replies):
            if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
                raise ScorerProtocolError(f"score {score!r} outside [0,1] for pair ({a!r}, {b!r})")
            batch_scores.append(PairScore(a=a, b=b, kind=kind, score=float(score), scorer_id=scorer.scorer_id))
        if checkpoint is not None:
            _append_scores(_checkpoint_scores_path(checkpoint), batch_scores)
            completed.add(index)
            _write_checkpoint_meta(checkpoint, completed, batch_size, total)
        for offset, item in enumerate(batch_scores, start=start):
            results[offset] = item

    if checkpoint is not None:
        _checkpoint_scores_path(checkpoint).unlink(missing_ok=True)
        checkpoint.unlink(missing_ok=True)
    return [results[i] for i in range(total)]


def apply_threshold(scores: Sequence[PairScore], threshold: float) -> "list[RelEdge]":
    """Keep scores >= threshold as relationship edges, sorted by (a, b)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0,1], got {threshold}")
    from .graph import RelEdge

    kept = [
        RelEdge(a=s.a, b=s.b, kind=s.kind, score=s.score, scorer_id=s.scorer_id)
        for s in scores
        if s.score >= threshold
    ]
    return sorted(kept, key=lambda e: (e.a, e.b))


def write_raw_scores(scores: Sequence[PairScore], path: str | Path) -> None:
    """Persist raw pair scores as JSON-lines, one record per pair."""
    with open(path, "w", encoding="utf-8") as fh:
        for item in scores:
            fh.write(
                json.dumps(
                    {"a": item.a, "b": item.b, "kind": item.kind, "score": item.score, "scorer_id": item.scorer_id},
                    sort_keys=True,
                )
                + "\n"
            )


# --------------------------------------------------------------------------
# Baseline scorers
# --------------------------------------------------------------------------


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The fixed 50-word function-word list shipped with the package."""
    text = resources.files("rationale_miner").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    words = frozenset(w for w in text.split() if w)
    return words


def _tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def baseline_similarity(a: str, b: str) -> float:
    """Cosine similarity of lowercase token-count vectors.

    Identical token multisets score exactly 1.0; disjoint vocabularies 0.0;
    two empty token lists count as identical.
    """
    counts_a = Counter(_tokens(a))
    counts_b = Counter(_tokens(b))
    if counts_a == counts_b:
        return 1.0
    if not counts_a or not counts_b:
        return 0.0
    dot = sum(count * counts_b[token] for token, count in counts_a.items())
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in counts_a.values()))
    norm_b = math.sqrt(sum(c * c for c in counts_b.values()))
    return min(1.0, dot / (norm_a * norm_b))


def baseline_contradiction(a: str, b: str) -> float:
    """Lexical contradiction rule over shared tokens and antonym verb pairs.

    0.95 when an antonym pair spans the texts and they share at least two
    tokens; 0.5 when they share at least two non-stopword tokens without
    an antonym pair; 0.0 otherwise. Symmetric by construction.
    """
    tokens_a = set(_tokens(a))
    tokens_b = set(_tokens(b))
    shared = tokens_a & tokens_b
    has_antonym = any(
        (x in tokens_a and y in tokens_b) or (y in tokens_a and x in tokens_b) for x, y in _ANTONYMS
    )
    if has_antonym and len(shared) >= 2:
        return 0.95
    if len(shared - stopwords()) >= 2:
        return 0.5
    return 0.0


class BaselineScorer:
    """Deterministic lexical scorer handling both relationship kinds."""

    scorer_id = "baseline-lexical"

    def score_batch(self, kind: str, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if kind == SIMILAR:
            return [baseline_similarity(a, b) for a, b in pairs]
        if kind == CONTRADICTS:
            return [baseline_contradiction(a, b) for a, b in pairs]
        raise ValueError(f"unknown kind {kind!r}")
