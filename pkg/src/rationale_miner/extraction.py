"""Turning dual-labelled sentences into decision/rationale triples.

Each sentence that carries both a Decision and a Rationale label goes
through a pluggable extractor (the offline baseline splits at rationale
connectives; a sidecar can host an LLM behind the same interface). Raw
extractor output is kept verbatim in an outcome record; a sentinel filter
then decides which outcomes become triples and which are dropped, with
per-status drop counts so nothing silently disappears.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .corpus import DECISION, RATIONALE, Sentence
from .errors import FormatError
from .labeling import TERSE_JUDGMENTS

STATUS_OK = "ok"
STATUS_MISSING_DECISION = "missing_decision"
STATUS_MISSING_RATIONALE = "missing_rationale"
STATUS_MISSING_BOTH = "missing_both"
STATUS_MALFORMED = "malformed"
STATUSES = (
    STATUS_OK,
    STATUS_MISSING_DECISION,
    STATUS_MISSING_RATIONALE,
    STATUS_MISSING_BOTH,
    STATUS_MALFORMED,
)

# Replies longer than this per field are treated as malformed output.
FIELD_CHAR_LIMIT = 2000

_NULL_SENTINELS = frozenset({"none", "n/a", "null", ""})
_WORD_RE = re.compile(r"[a-z0-9]+")

# Ordered connective list; the earliest occurrence in the sentence wins.
CONNECTIVES = (" because ", " since ", " so that ", " in order to ", " to avoid ", " as ")


def is_missing_entity(text: str | None) -> bool:
    """True when an extractor field denotes "no entity here".

    Absent values count, as do the null sentinels (none/n/a/null) once
    surrounding whitespace, quotes, and leading dashes are trimmed, in any
    letter case. Idempotent: re-checking the trimmed form gives the same
    answer.
    """
    if text is None:
        return True
    cleaned = text.strip().strip("\"'").lstrip("-").strip()
    return cleaned.lower() in _NULL_SENTINELS


@dataclass(frozen=True)
class DRTriple:
    """One decision/rationale pair extracted from a single sentence."""

    sentence_id: str
    commit_id: str
    decision_text: str
    rationale_text: str
    extractor_id: str

    def __post_init__(self):
        for name, value in (("decision_text", self.decision_text), ("rationale_text", self.rationale_text)):
            if not value.strip():
                raise ValueError(f"triple {self.sentence_id}: empty {name}")
            if is_missing_entity(value):
                raise ValueError(f"triple {self.sentence_id}: {name} is a null sentinel")


@dataclass(frozen=True)
class ExtractionOutcome:
    """Verbatim extractor output for one sentence plus its filter status."""

    sentence_id: str
    raw_decision: str | None
    raw_rationale: str | None
    status: str
    commit_id: str = ""
    extractor_id: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass(frozen=True)
class ExtractorReply:
    decision: str | None
    rationale: str | None
    malformed: bool = False


class Extractor(Protocol):
    extractor_id: str

    def extract(self, text: str) -> ExtractorReply: ...


def _status_for(raw_decision: str | None, raw_rationale: str | None, malformed: bool) -> str:
    if malformed:
        return STATUS_MALFORMED
    for raw in (raw_decision, raw_rationale):
        if raw is not None and len(raw) > FIELD_CHAR_LIMIT:
            return STATUS_MALFORMED
    decision_missing = is_missing_entity(raw_decision)
    rationale_missing = is_missing_entity(raw_rationale)
    if decision_missing and rationale_missing:
        return STATUS_MISSING_BOTH
    if decision_missing:
        return STATUS_MISSING_DECISION
    if rationale_missing:
        return STATUS_MISSING_RATIONALE
    return STATUS_OK


def extract_pair(extractor: Extractor, sentence: Sentence) -> ExtractionOutcome:
    """Run one sentence through an extractor and classify the raw reply."""
    if not (sentence.has(DECISION) and sentence.has(RATIONALE)):
        raise ValueError(f"sentence {sentence.id} is not labelled both Decision and Rationale")
    reply = extractor.extract(sentence.text)
    return ExtractionOutcome(
        sentence_id=sentence.id,
        raw_decision=reply.decision,
        raw_rationale=reply.rationale,
        status=_status_for(reply.decision, reply.rationale, reply.malformed),
        commit_id=sentence.commit_id,
        extractor_id=extractor.extractor_id,
    )


def extract_all(
    extractor: Extractor,
    sentences: Sequence[Sentence],
    parallelism: int = 4,
    exclusions: frozenset[str] = frozenset(),
) -> list[ExtractionOutcome]:
    """Extract every sentence (minus explicit exclusions), preserving order.

    Requests run with bounded parallelism; outcomes come back keyed by
    sentence id and are re-emitted in input sentence order.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    wanted = [s for s in sentences if s.id not in exclusions]
    if parallelism == 1 or len(wanted) <= 1:
        return [extract_pair(extractor, s) for s in wanted]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        by_id = {o.sentence_id: o for o in pool.map(lambda s: extract_pair(extractor, s), wanted)}
    return [by_id[s.id] for s in wanted]


def filter_triples(outcomes: Iterable[ExtractionOutcome]) -> tuple[list[DRTriple], dict[str, int]]:
    """Keep ok outcomes as triples; count the dropped ones by status.

    len(triples) + sum(dropped.values()) always equals len(outcomes).
    """
    triples: list[DRTriple] = []
    dropped = {status: 0 for status in STATUSES if status != STATUS_OK}
    for outcome in outcomes:
        if outcome.status != STATUS_OK:
            dropped[outcome.status] += 1
            continue
        assert outcome.raw_decision is not None and outcome.raw_rationale is not None
        triples.append(
            DRTriple(
                sentence_id=outcome.sentence_id,
                commit_id=outcome.commit_id,
                decision_text=outcome.raw_decision.strip(),
                rationale_text=outcome.raw_rationale.strip(),
                extractor_id=outcome.extractor_id,
            )
        )
    return triples, dropped


# --------------------------------------------------------------------------
# Offline baseline extractor
# --------------------------------------------------------------------------


def baseline_extract(text: str) -> tuple[str | None, str | None]:
    """Split a sentence into (decision, rationale) at a rationale connective.

    The earliest connective occurrence wins (case-insensitive): the left
    side becomes the decision and the rationale starts at the connective
    word. Without a connective, a terse value judgment (fix/cleanup/typo)
    makes the whole sentence serve as both; otherwise both are missing.
    """
    lowered = text.lower()
    best: tuple[int, str] | None = None
    for connective in CONNECTIVES:
        pos = lowered.find(connective)
        if pos != -1 and (best is None or pos < best[0]):
            best = (pos, connective)
    if best is not None:
        pos, connective = best
        decision = text[:pos].strip()
        rationale = text[pos + 1 :].strip()  # keep the connective word itself
        if decision and rationale:
            return decision, rationale
    if set(_WORD_RE.findall(lowered)) & TERSE_JUDGMENTS:
        whole = text.strip()
        return whole, whole
    return None, None


class BaselineExtractor:
    """Connective-splitting extractor; fully offline and deterministic."""

    extractor_id = "baseline-connective"

    def extract(self, text: str) -> ExtractorReply:
        decision, rationale = baseline_extract(text)
        return ExtractorReply(decision=decision, rationale=rationale)


# --------------------------------------------------------------------------
# Triple persistence (JSON-lines)
# --------------------------------------------------------------------------


def write_triples(triples: Sequence[DRTriple], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for triple in triples:
            fh.write(
                json.dumps(
                    {
                        "sentence_id": triple.sentence_id,
                        "commit_id": triple.commit_id,
                        "decision": triple.decision_text,
                        "rationale": triple.rationale_text,
                        "extractor_id": triple.extractor_id,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_triples(path: str | Path) -> list[DRTriple]:
    path = Path(path)
    triples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path=path, line=lineno) from exc
            try:
                triples.append(
                    DRTriple(
                        sentence_id=record["sentence_id"],
                        commit_id=record["commit_id"],
                        decision_text=record["decision"],
                        rationale_text=record["rationale"],
                        extractor_id=record["extractor_id"],
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"bad triple record ({exc})", path=path, line=lineno) from exc
    return triples


def read_exclusions(path: str | Path) -> frozenset[str]:
    """Sentence ids to skip, one per line; blank lines and # comments ignored."""
    out = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.strip()
            if entry and not entry.startswith("#"):
                out.add(entry)
    return frozenset(out)
