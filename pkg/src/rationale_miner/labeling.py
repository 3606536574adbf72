"""Sentence classification and the evaluation harness around it.

The built-in classifier is a deterministic cue-list heuristic so the whole
pipeline runs offline; trained models plug in behind the same interface,
either as a prediction CSV produced elsewhere or as a live sidecar service.
Evaluation covers the two binary tasks (decision, rationale), per-rater
human baselines, Fleiss' kappa, and plain unanimous-agreement proportions.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np

from .corpus import DECISION, RATIONALE, LabeledDataset, Sentence
from .errors import FormatError

TASKS = ("decision", "rationale")

# Imperative change verbs that mark a decision sentence.
DECISION_VERBS = frozenset(
    "add remove fix move rename replace use make change introduce delete "
    "drop switch refactor update avoid clean".split()
)

# Single-token rationale cues plus multi-word connective phrases.
RATIONALE_WORDS = frozenset({"because", "since", "otherwise", "fixes", "prevents"})
RATIONALE_PHRASES = (
    "so that",
    "in order to",
    "to avoid",
    "to allow",
    "to make",
    "instead of",
    "will make",
)

# Terse value judgments count as both decision and rationale.
TERSE_JUDGMENTS = frozenset({"fix", "cleanup", "typo"})

_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class LabelPrediction:
    sentence_id: str
    decision: bool
    rationale: bool
    decision_score: float
    rationale_score: float
    classifier_id: str

    def __post_init__(self):
        for score in (self.decision_score, self.rationale_score):
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"score out of [0,1]: {score}")


class Classifier(Protocol):
    classifier_id: str

    def predict(self, sentences: Sequence[Sentence]) -> list[LabelPrediction]: ...


def _tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


class BaselineClassifier:
    """Offline cue-list classifier; deterministic and training-free."""

    classifier_id = "baseline-heuristic"

    def predict(self, sentences: Sequence[Sentence]) -> list[LabelPrediction]:
        return [self._predict_one(s) for s in sentences]

    def _predict_one(self, sentence: Sentence) -> LabelPrediction:
        tokens = set(_tokens(sentence.text))
        normalized = " ".join(_tokens(sentence.text))
        terse = bool(tokens & TERSE_JUDGMENTS)
        decision = terse or bool(tokens & DECISION_VERBS)
        rationale = (
            terse
            or bool(tokens & RATIONALE_WORDS)
            or any(f" {phrase} " in f" {normalized} " for phrase in RATIONALE_PHRASES)
        )
        return LabelPrediction(
            sentence_id=sentence.id,
            decision=decision,
            rationale=rationale,
            decision_score=1.0 if decision else 0.0,
            rationale_score=1.0 if rationale else 0.0,
            classifier_id=self.classifier_id,
        )


class PredictionFileClassifier:
    """Replays predictions from a CSV of ``sentence_id,decision,rationale`` rows."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.classifier_id = f"file:{self.path.name}"
        self._rows: dict[str, tuple[bool, bool]] = {}
        with open(self.path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["sentence_id", "decision", "rationale"]:
                raise FormatError("bad header, expected sentence_id,decision,rationale", path=self.path, line=1)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 3:
                    raise FormatError(f"expected 3 columns, got {len(row)}", path=self.path, line=lineno)
                sid, dec, rat = row
                if dec not in {"0", "1"} or rat not in {"0", "1"}:
                    raise FormatError("flags must be 0 or 1", path=self.path, line=lineno)
                self._rows[sid] = (dec == "1", rat == "1")

    def predict(self, sentences: Sequence[Sentence]) -> list[LabelPrediction]:
        out = []
        for sentence in sentences:
            if sentence.id not in self._rows:
                raise FormatError(f"prediction file missing sentence id {sentence.id!r}", path=self.path)
            decision, rationale = self._rows[sentence.id]
            out.append(
                LabelPrediction(
                    sentence_id=sentence.id,
                    decision=decision,
                    rationale=rationale,
                    decision_score=1.0 if decision else 0.0,
                    rationale_score=1.0 if rationale else 0.0,
                    classifier_id=self.classifier_id,
                )
            )
        return out


def classify(classifier: Classifier, sentences: Sequence[Sentence]) -> list[LabelPrediction]:
    """Run a classifier over sentences, one prediction per input, same order."""
    predictions = classifier.predict(sentences)
    if len(predictions) != len(sentences):
        raise ValueError(
            f"classifier {classifier.classifier_id} returned {len(predictions)} "
            f"predictions for {len(sentences)} sentences"
        )
    for sentence, prediction in zip(sentences, predictions):
        if prediction.sentence_id != sentence.id:
            raise ValueError(f"prediction order mismatch at {sentence.id}")
    return predictions


# --------------------------------------------------------------------------
# Cross-validation folds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignments: dict[str, int]

    def fold_ids(self, fold: int) -> list[str]:
        return sorted(i for i, f in self.assignments.items() if f == fold)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.assignments.values():
            counts[f] += 1
        return counts


def kfold_split(ids: Sequence[str], k: int, seed: int) -> FoldPlan:
    """Partition ids into k folds whose sizes differ by at most one.

    The assignment is a pure function of (ids, k, seed): ids are sorted,
    shuffled with a seeded RNG, and dealt round-robin.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > len(ids):
        raise ValueError(f"k={k} exceeds the number of ids ({len(ids)})")
    if len(set(ids)) != len(ids):
        raise ValueError("ids must be unique")
    import random

    order = sorted(ids)
    random.Random(seed).shuffle(order)
    return FoldPlan(k=k, seed=seed, assignments={sid: pos % k for pos, sid in enumerate(order)})


# --------------------------------------------------------------------------
# Metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricsReport:
    """Confusion counts plus derived metrics for one binary task.

    Ratios with a zero denominator are reported as 0.0 and named in
    ``undefined`` instead of surfacing NaN.
    """

    task: str
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    precision_pos: float
    recall_pos: float
    f1_pos: float
    precision_neg: float
    recall_neg: float
    f1_neg: float
    undefined: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "accuracy": self.accuracy,
            "precision_pos": self.precision_pos,
            "recall_pos": self.recall_pos,
            "f1_pos": self.f1_pos,
            "precision_neg": self.precision_neg,
            "recall_neg": self.recall_neg,
            "f1_neg": self.f1_neg,
            "undefined": list(self.undefined),
        }


def metrics_from_counts(tp: int, fp: int, fn: int, tn: int, task: str = "decision") -> MetricsReport:
    undefined: list[str] = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    def f1(p: float, r: float, name: str) -> float:
        if p + r == 0.0:
            undefined.append(name)
            return 0.0
        return 2.0 * p * r / (p + r)

    accuracy = ratio(tp + tn, tp + fp + fn + tn, "accuracy")
    precision_pos = ratio(tp, tp + fp, "precision_pos")
    recall_pos = ratio(tp, tp + fn, "recall_pos")
    precision_neg = ratio(tn, tn + fn, "precision_neg")
    recall_neg = ratio(tn, tn + fp, "recall_neg")
    return MetricsReport(
        task=task,
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        accuracy=accuracy,
        precision_pos=precision_pos,
        recall_pos=recall_pos,
        f1_pos=f1(precision_pos, recall_pos, "f1_pos"),
        precision_neg=precision_neg,
        recall_neg=recall_neg,
        f1_neg=f1(precision_neg, recall_neg, "f1_neg"),
        undefined=tuple(undefined),
    )


def _confusion(pred_flags: Mapping[str, bool], gold_flags: Mapping[str, bool]) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for sid, predicted in pred_flags.items():
        actual = gold_flags[sid]
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def evaluate(predictions: Sequence[LabelPrediction], gold: LabeledDataset, task: str) -> MetricsReport:
    """Score predictions against gold labels for one task."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    gold_flags = gold.gold_flags(task)
    missing = [p.sentence_id for p in predictions if p.sentence_id not in gold_flags]
    if missing:
        raise ValueError(f"predictions reference ids absent from gold: {missing[:5]}")
    pred_flags = {p.sentence_id: (p.decision if task == "decision" else p.rationale) for p in predictions}
    return metrics_from_counts(*_confusion(pred_flags, gold_flags), task=task)


def rater_performance(
    rater_labels: Mapping[str, frozenset[str]], gold: LabeledDataset, task: str
) -> MetricsReport:
    """Treat one rater's labels as predictions against the final labelling."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    label = DECISION if task == "decision" else RATIONALE
    gold_flags = gold.gold_flags(task)
    missing = [sid for sid in gold_flags if sid not in rater_labels]
    if missing:
        raise ValueError(f"rater labels missing ids: {missing[:5]}")
    pred_flags = {sid: label in rater_labels[sid] for sid in gold_flags}
    return metrics_from_counts(*_confusion(pred_flags, gold_flags), task=task)


def mean_metrics(reports: Sequence[MetricsReport]) -> dict:
    """Unweighted mean of per-fold metric values; counts are summed."""
    if not reports:
        raise ValueError("no reports to aggregate")
    keys = ("accuracy", "precision_pos", "recall_pos", "f1_pos", "precision_neg", "recall_neg", "f1_neg")
    out: dict = {"task": reports[0].task, "aggregation": "per-fold-mean", "folds": len(reports)}
    for key in keys:
        out[key] = float(np.mean([getattr(r, key) for r in reports]))
    for key in ("tp", "fp", "fn", "tn"):
        out[key] = int(sum(getattr(r, key) for r in reports))
    return out


# --------------------------------------------------------------------------
# Agreement statistics
# --------------------------------------------------------------------------


def fleiss_kappa(table: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa for a fixed number of raters over categorical items.

    ``table`` has one row per item and one column per category; each cell
    counts the raters who placed the item in that category, so every row
    must sum to the same rater count n >= 2. Observed agreement P-bar is the
    mean over items of (sum of squared cell counts - n) / (n(n-1)); chance
    agreement P-bar-e is the sum of squared category marginals. Kappa is
    (P-bar - P-bar-e) / (1 - P-bar-e), taken as 1.0 in the degenerate case
    where chance agreement is already perfect.
    """
    counts = np.asarray(table, dtype=float)
    if counts.ndim != 2 or counts.size == 0:
        raise ValueError("table must be a non-empty item x category matrix")
    row_sums = counts.sum(axis=1)
    n = row_sums[0]
    if not np.all(row_sums == n):
        raise ValueError("ragged rows: every item must have the same number of ratings")
    if n < 2:
        raise ValueError(f"need at least 2 raters, got {int(n)}")

    n_items = counts.shape[0]
    p_categories = counts.sum(axis=0) / (n_items * n)
    p_items = ((counts * counts).sum(axis=1) - n) / (n * (n - 1))
    p_bar = p_items.mean()
    p_bar_e = float((p_categories * p_categories).sum())
    if abs(1.0 - p_bar_e) < 1e-15:
        return 1.0
    return float((p_bar - p_bar_e) / (1.0 - p_bar_e))


def unanimous_agreement(ratings: Sequence[Sequence[object]]) -> float:
    """Proportion of items on which every rater gave the identical value.

    ``ratings`` is item-major: one inner sequence of per-rater values per
    item. Returns 1.0 vacuously for an empty item list.
    """
    if not ratings:
        return 1.0
    n_raters = len(ratings[0])
    if n_raters < 2:
        raise ValueError("need at least 2 raters")
    for row in ratings:
        if len(row) != n_raters:
            raise ValueError("ragged rows: every item must have the same number of raters")
    unanimous = sum(1 for row in ratings if all(v == row[0] for v in row[1:]))
    return unanimous / len(ratings)


def rater_flag_matrix(dataset: LabeledDataset, task: str) -> list[list[bool]]:
    """Item-major per-rater boolean flags for one task, ordered by sentence."""
    if dataset.rater_columns is None:
        raise ValueError("dataset has no per-rater columns")
    label = DECISION if task == "decision" else RATIONALE
    return [
        [label in col[s.id] for col in dataset.rater_columns]
        for s in dataset.sentences
    ]


def rating_count_table(flag_matrix: Iterable[Sequence[bool]]) -> list[list[int]]:
    """Collapse per-rater booleans into the two-column count table kappa expects."""
    table = []
    for row in flag_matrix:
        positive = sum(1 for v in row if v)
        table.append([len(row) - positive, positive])
    return table
