"""Mounted classifier artifacts.

An artifact is a JSON file mapping exact sentence texts to decision and
rationale flags, with an optional default row for texts outside the
table. It stands in for an operator-supplied model behind the /classify
endpoint: the service only transports its answers, it never trains or
guesses.
"""

from __future__ import annotations

import json
from pathlib import Path


class ArtifactError(Exception):
    """The mounted classifier artifact is unreadable or malformed."""


_FALLBACK = {"decision": False, "rationale": False, "scores": {"decision": 0.0, "rationale": 0.0}}


def _normalize_row(row, where: str) -> dict:
    if not isinstance(row, dict) or "decision" not in row or "rationale" not in row:
        raise ArtifactError(f"{where}: rows need boolean 'decision' and 'rationale' fields")
    decision = row["decision"]
    rationale = row["rationale"]
    if not isinstance(decision, bool) or not isinstance(rationale, bool):
        raise ArtifactError(f"{where}: decision/rationale must be booleans")
    scores = row.get("scores", {"decision": 1.0 if decision else 0.0, "rationale": 1.0 if rationale else 0.0})
    if not isinstance(scores, dict):
        raise ArtifactError(f"{where}: scores must be an object")
    return {"decision": decision, "rationale": rationale, "scores": scores}


class MountedClassifier:
    """Lookup-table classifier loaded from a JSON artifact."""

    def __init__(self, model_id: str, table: dict, default: dict | None):
        self.model_id = model_id
        self._table = table
        self._default = default

    @classmethod
    def from_path(cls, path: str | Path) -> "MountedClassifier":
        path = Path(path)
        if not path.exists():
            raise ArtifactError(f"classifier artifact not found: {path}")
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ArtifactError(f"classifier artifact {path} is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("table"), dict):
            raise ArtifactError(f"classifier artifact {path} needs an object 'table'")
        table = {
            text: _normalize_row(row, f"{path} table[{text!r}]")
            for text, row in payload["table"].items()
        }
        default = None
        if "default" in payload:
            default = _normalize_row(payload["default"], f"{path} default")
        model_id = payload.get("model_id", path.stem)
        if not isinstance(model_id, str):
            raise ArtifactError(f"classifier artifact {path}: model_id must be a string")
        return cls(model_id=model_id, table=table, default=default)

    def info(self) -> dict:
        return {"kind": "classifier", "model_id": self.model_id, "rows": len(self._table)}

    def classify(self, sentences: list[str]) -> list[dict]:
        out = []
        for text in sentences:
            row = self._table.get(text) or self._default or _FALLBACK
            out.append(dict(row))
        return out
