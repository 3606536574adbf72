"""Upstream completion calls and reply parsing for entity extraction.

The upstream model is any HTTP endpoint that accepts a JSON body
{"prompt": <mounted prompt text>, "input": <sentence>} with an optional
bearer key and answers {"completion": <model reply>}. Its reply is
expected to carry one "Decision:" and one "Rationale:" field; fields whose
value is a null sentinel come back as JSON null, and replies missing
either marker are not guessed at: both fields null plus the raw reply
echoed for the caller to inspect.
"""

from __future__ import annotations

import re

import httpx

# Values a model uses to say "nothing here"; matching is case-insensitive
# after stripping wrapping punctuation.
NULL_SENTINELS = frozenset({"", "none", "null", "n/a", "na", "nan", "-"})

_DECISION_RE = re.compile(r"decision\s*:\s*(.*?)(?=\s*rationale\s*:|\Z)", re.IGNORECASE | re.DOTALL)
_RATIONALE_RE = re.compile(r"rationale\s*:\s*(.*)\Z", re.IGNORECASE | re.DOTALL)


class UpstreamError(Exception):
    """The completion endpoint failed or answered garbage."""


class UpstreamRateLimited(Exception):
    """The completion endpoint returned 429; propagate, do not retry here."""


def _clean_field(value: str) -> str | None:
    cleaned = value.strip().strip("\"'").strip()
    if cleaned.rstrip(".").strip().lower() in NULL_SENTINELS:
        return None
    return cleaned


def parse_reply(raw: str) -> dict | None:
    """Split a model reply into decision/rationale, or None if unparseable.

    A reply parses only when both field markers are present; anything else
    (bare text, a single marker, noise) is the caller's problem to surface.
    """
    decision_match = _DECISION_RE.search(raw)
    rationale_match = _RATIONALE_RE.search(raw)
    if not decision_match or not rationale_match:
        return None
    return {
        "decision": _clean_field(decision_match.group(1)),
        "rationale": _clean_field(rationale_match.group(1)),
    }


class UpstreamExtractor:
    """Thin client for the configured completion endpoint."""

    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 30.0):
        if not endpoint:
            raise ValueError("endpoint must be non-empty")
        self.endpoint = endpoint
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, headers=headers)

    def complete(self, prompt: str, sentence: str) -> str:
        try:
            response = self._client.post(self.endpoint, json={"prompt": prompt, "input": sentence})
        except httpx.HTTPError as exc:
            raise UpstreamError(f"completion endpoint unreachable: {exc}") from exc
        if response.status_code == 429:
            raise UpstreamRateLimited(response.text[:500])
        if response.status_code != 200:
            raise UpstreamError(f"completion endpoint returned {response.status_code}")
        try:
            body = response.json()
        except ValueError as exc:
            raise UpstreamError("completion endpoint returned non-JSON body") from exc
        completion = body.get("completion") if isinstance(body, dict) else None
        if not isinstance(completion, str):
            raise UpstreamError("completion endpoint reply has no string 'completion'")
        return completion
