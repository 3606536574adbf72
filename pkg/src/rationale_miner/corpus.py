"""Commit acquisition, sentence splitting, and labeled-dataset loading.

Commit messages arrive as exported files (JSON-lines or plain ``git log``
output), get split into sentences with an identifier-aware boundary rule,
and labeled corpora are read from two fixed CSV schemas:

* ``oom``  - sentence-level rows with a final label column plus three
  per-rater columns, labels drawn from {Decision, Rationale, SupportingFacts}
* ``tian`` - message-level rows with a four-token what/why label that is
  mapped onto per-sentence Decision/Rationale flags
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from datetime import datetime
from email.utils import parsedate_to_datetime
from pathlib import Path

from .errors import FormatError

DECISION = "Decision"
RATIONALE = "Rationale"
SUPPORTING_FACTS = "SupportingFacts"
LABEL_TOKENS = frozenset({DECISION, RATIONALE, SUPPORTING_FACTS})

TIAN_LABELS = ("Why_and_What", "No_What", "No_Why", "Neither_Why_nor_What")

_OOM_HEADER = ["commit_id", "sentence_index", "text", "labels", "rater1", "rater2", "rater3"]
_TIAN_HEADER = ["project", "commit_id", "message", "label", "non_atomic"]


@dataclass(frozen=True)
class Commit:
    """One commit record: hash, owning project, full message text."""

    id: str
    project: str
    message: str
    timestamp: str | None = None


@dataclass(frozen=True)
class Sentence:
    """A single commit-message sentence with multi-label flags."""

    id: str
    commit_id: str
    index: int
    text: str
    labels: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"sentence {self.id}: empty text")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError(f"sentence {self.id}: text contains line terminators")

    def has(self, label: str) -> bool:
        return label in self.labels


@dataclass
class LabeledDataset:
    """Sentences with gold labels, optionally with per-rater label columns."""

    sentences: list[Sentence]
    source_format: str
    rater_columns: list[dict[str, frozenset[str]]] | None = None

    def __post_init__(self):
        ids = [s.id for s in self.sentences]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate sentence ids in dataset")
        if self.rater_columns is not None:
            wanted = set(ids)
            for i, col in enumerate(self.rater_columns):
                if set(col) != wanted:
                    raise ValueError(f"rater column {i + 1} does not cover every sentence")

    @property
    def commit_count(self) -> int:
        return len({s.commit_id for s in self.sentences})

    def gold_flags(self, task: str) -> dict[str, bool]:
        """Map sentence id to the boolean gold label for a task ('decision'/'rationale')."""
        label = {"decision": DECISION, "rationale": RATIONALE}[task]
        return {s.id: label in s.labels for s in self.sentences}


@dataclass
class IngestResult:
    commits: list[Commit]
    skipped_empty: int = 0


# --------------------------------------------------------------------------
# Sentence splitting
# --------------------------------------------------------------------------

_TERMINATORS = ".!?"
# Token (sans terminator) that ends in a short dotted extension, e.g.
# oom_kill.c / e.g / v2.1 - the trailing terminator is part of the
# identifier's neighborhood, not a sentence boundary.
_EXTENSION_RE = re.compile(r"\.[A-Za-z0-9]{1,4}$")
_BLANK_LINE_RE = re.compile(r"\n[ \t\r]*\n")
_WS_RUN_RE = re.compile(r"\s+")


def _is_protected_boundary(block: str, i: int) -> bool:
    """True when the terminator at position ``i`` sits on an identifier-like
    token (file extension, abbreviation, version number) and must not split."""
    start = i
    while start > 0 and not block[start - 1].isspace():
        start -= 1
    token = block[start:i]  # token text before the terminator
    return bool(_EXTENSION_RE.search(token))


def _split_block(block: str) -> list[str]:
    out = []
    begin = 0
    for i, ch in enumerate(block):
        if ch not in _TERMINATORS:
            continue
        at_end = i + 1 == len(block)
        if not at_end and not block[i + 1].isspace():
            continue  # terminator inside a token (oom_kill.c handling)
        if _is_protected_boundary(block, i):
            continue
        piece = block[begin : i + 1].strip()
        if piece:
            out.append(piece)
        begin = i + 1
    tail = block[begin:].strip()
    if tail:
        out.append(tail)
    return out


def split_sentences(message: str) -> list[str]:
    """Split a commit message into sentences.

    Boundaries are '.', '!' or '?' followed by whitespace or end-of-text,
    plus blank lines. Terminators embedded in identifier-like tokens
    (``mm/oom_kill.c``, ``e.g.``, ``v2.1``) never split. Single newlines
    inside a paragraph are treated as soft wraps and collapse to spaces;
    no non-whitespace character is ever lost.
    """
    sentences: list[str] = []
    for raw_block in _BLANK_LINE_RE.split(message):
        block = _WS_RUN_RE.sub(" ", raw_block).strip()
        if block:
            sentences.extend(_split_block(block))
    return sentences


def make_sentences(commit: Commit, labels: frozenset[str] = frozenset()) -> list[Sentence]:
    """Split a commit's message and wrap each piece as a Sentence."""
    return [
        Sentence(
            id=f"{commit.id}#{i}",
            commit_id=commit.id,
            index=i,
            text=text,
            labels=labels,
        )
        for i, text in enumerate(split_sentences(commit.message))
    ]


# --------------------------------------------------------------------------
# Commit ingestion
# --------------------------------------------------------------------------


def ingest_commits(source: str | Path, format: str = "json-lines") -> IngestResult:
    """Read commit records from a file or directory.

    ``json-lines`` expects one object per line with keys id/project/message
    and an optional timestamp; ``git-log-export`` parses default ``git log``
    output (the file stem becomes the project id). Records whose message is
    empty after trimming are skipped and counted, not errors.
    """
    path = Path(source)
    if not path.exists():
        raise FormatError("no such file or directory", path=path)
    if path.is_dir():
        suffix = ".jsonl" if format == "json-lines" else ".log"
        files = sorted(p for p in path.iterdir() if p.is_file() and p.suffix == suffix)
    else:
        files = [path]

    commits: list[Commit] = []
    skipped = 0
    for file in files:
        if format == "json-lines":
            got, miss = _parse_jsonl(file)
        elif format == "git-log-export":
            got, miss = _parse_git_log(file)
        else:
            raise FormatError(f"unknown commit input format: {format!r}", path=file)
        commits.extend(got)
        skipped += miss
    return IngestResult(commits=commits, skipped_empty=skipped)


def _parse_jsonl(path: Path) -> tuple[list[Commit], int]:
    commits = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path=path, line=lineno) from exc
            if not isinstance(record, dict):
                raise FormatError("record is not an object", path=path, line=lineno)
            for key in ("id", "project", "message"):
                if not isinstance(record.get(key), str):
                    raise FormatError(f"missing or non-string field {key!r}", path=path, line=lineno)
            if not record["id"]:
                raise FormatError("empty commit id", path=path, line=lineno)
            if not record["message"].strip():
                skipped += 1
                continue
            timestamp = record.get("timestamp")
            if timestamp is not None and not isinstance(timestamp, str):
                raise FormatError("timestamp must be a string", path=path, line=lineno)
            commits.append(
                Commit(
                    id=record["id"],
                    project=record["project"],
                    message=record["message"],
                    timestamp=timestamp,
                )
            )
    return commits, skipped


_GIT_DATE_FORMATS = ("%a %b %d %H:%M:%S %Y %z",)


def _parse_git_date(raw: str) -> str | None:
    raw = raw.strip()
    for fmt in _GIT_DATE_FORMATS:
        try:
            return datetime.strptime(raw, fmt).isoformat()
        except ValueError:
            pass
    try:
        return parsedate_to_datetime(raw).isoformat()
    except (TypeError, ValueError):
        pass
    try:
        return datetime.fromisoformat(raw).isoformat()
    except ValueError:
        return None


def _parse_git_log(path: Path) -> tuple[list[Commit], int]:
    project = path.stem
    commits = []
    skipped = 0

    current_id: str | None = None
    current_date: str | None = None
    message_lines: list[str] = []

    def flush():
        nonlocal skipped
        if current_id is None:
            return
        message = "\n".join(message_lines).strip("\n")
        if not message.strip():
            skipped += 1
            return
        commits.append(
            Commit(id=current_id, project=project, message=message, timestamp=current_date)
        )

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith("commit "):
                flush()
                current_id = line[len("commit ") :].split()[0] if line[len("commit ") :].strip() else ""
                if not current_id:
                    raise FormatError("commit line without a hash", path=path, line=lineno)
                current_date = None
                message_lines = []
            elif current_id is None:
                if line.strip():
                    raise FormatError("content before first commit header", path=path, line=lineno)
            elif line.startswith("Date:"):
                current_date = _parse_git_date(line[len("Date:") :])
            elif line.startswith("    "):
                message_lines.append(line[4:])
            elif not line.strip():
                # Blank line inside a body: paragraph break. Exports often
                # strip git's 4-space indent from empty body lines; leading
                # and trailing blanks are trimmed at flush time anyway.
                message_lines.append("")
            # other header lines (Author:, Merge:, ...) are skipped
    flush()
    return commits, skipped


# --------------------------------------------------------------------------
# Labeled datasets
# --------------------------------------------------------------------------


def map_tian_labels(label: str) -> tuple[bool, bool]:
    """Map a what/why message label to (has_decision, has_rationale).

    The What side of the label marks decision content and the Why side
    marks rationale content, so ``No_Why`` (What only) maps to a decision
    without rationale and ``No_What`` (Why only) to the reverse.
    """
    mapping = {
        "Why_and_What": (True, True),
        "No_Why": (True, False),
        "No_What": (False, True),
        "Neither_Why_nor_What": (False, False),
    }
    if label not in mapping:
        raise ValueError(f"unknown label token: {label!r}")
    return mapping[label]


def _parse_label_set(raw: str, path: Path, lineno: int) -> frozenset[str]:
    tokens = [t for t in raw.split("|") if t]
    for token in tokens:
        if token not in LABEL_TOKENS:
            raise FormatError(f"unknown label token: {token!r}", path=path, line=lineno)
    return frozenset(tokens)


def load_labeled_dataset(path: str | Path, format: str, atomic_only: bool = False) -> LabeledDataset:
    """Load a labeled corpus in the ``oom`` or ``tian`` CSV schema."""
    path = Path(path)
    if not path.exists():
        raise FormatError("no such file", path=path)
    if format == "oom":
        return _load_oom(path)
    if format == "tian":
        return _load_tian(path, atomic_only=atomic_only)
    raise FormatError(f"unknown dataset format: {format!r}", path=path)


def _load_oom(path: Path) -> LabeledDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _OOM_HEADER:
            raise FormatError(
                f"bad header, expected {','.join(_OOM_HEADER)}", path=path, line=1
            )
        sentences = []
        raters: list[dict[str, frozenset[str]]] = [{}, {}, {}]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_OOM_HEADER):
                raise FormatError(f"expected {len(_OOM_HEADER)} columns, got {len(row)}", path=path, line=lineno)
            commit_id, index_raw, text, labels_raw, r1, r2, r3 = row
            try:
                index = int(index_raw)
            except ValueError:
                raise FormatError(f"bad sentence_index {index_raw!r}", path=path, line=lineno) from None
            sid = f"{commit_id}#{index}"
            try:
                sentence = Sentence(
                    id=sid,
                    commit_id=commit_id,
                    index=index,
                    text=text,
                    labels=_parse_label_set(labels_raw, path, lineno),
                )
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from exc
            sentences.append(sentence)
            for col, raw in zip(raters, (r1, r2, r3)):
                col[sid] = _parse_label_set(raw, path, lineno)
    try:
        return LabeledDataset(sentences=sentences, source_format="oom", rater_columns=raters)
    except ValueError as exc:
        raise FormatError(str(exc), path=path) from exc


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in {"true", "1", "yes"}


def _load_tian(path: Path, atomic_only: bool) -> LabeledDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        has_atomic_col = header == _TIAN_HEADER
        if not has_atomic_col and header != _TIAN_HEADER[:-1]:
            raise FormatError(
                f"bad header, expected {','.join(_TIAN_HEADER)}", path=path, line=1
            )
        sentences = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            expected = len(_TIAN_HEADER) if has_atomic_col else len(_TIAN_HEADER) - 1
            if len(row) != expected:
                raise FormatError(f"expected {expected} columns, got {len(row)}", path=path, line=lineno)
            project, commit_id, message, label = row[:4]
            if atomic_only and has_atomic_col and _parse_bool(row[4]):
                continue
            try:
                has_decision, has_rationale = map_tian_labels(label)
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from exc
            labels = set()
            if has_decision:
                labels.add(DECISION)
            if has_rationale:
                labels.add(RATIONALE)
            commit = Commit(id=commit_id, project=project, message=message)
            sentences.extend(make_sentences(commit, labels=frozenset(labels)))
    try:
        return LabeledDataset(sentences=sentences, source_format="tian", rater_columns=None)
    except ValueError as exc:
        raise FormatError(str(exc), path=path) from exc
