"""HTTP adapters for the scorer sidecar service.

The sidecar exposes model-backed scoring, classification, and extraction
over JSON; these classes make it look like the in-process baselines:
``SidecarScorer`` is a PairScorer, ``SidecarClassifier`` a Classifier,
``SidecarExtractor`` an Extractor. Transport problems (connectivity,
5xx, rate limits) raise transport errors so batch runs can checkpoint
and resume; malformed payloads raise protocol errors immediately.
"""

from __future__ import annotations

import os
from typing import Sequence

import requests

from .corpus import Sentence
from .errors import ExtractorError, ScorerProtocolError, ScorerTransportError
from .extraction import ExtractorReply
from .labeling import LabelPrediction
from .scoring import CONTRADICTS, SIMILAR

ENV_URL = "RATIONALE_SIDECAR_URL"
ENV_TOKEN = "RATIONALE_SIDECAR_TOKEN"

# Edge kinds map onto the wire protocol's scoring kinds.
KIND_TO_WIRE = {SIMILAR: "similarity", CONTRADICTS: "contradiction"}

# Client-side mistakes the server rejects; anything else is transient.
_PROTOCOL_STATUS = {400, 422}


def _auth_headers(token: str | None) -> dict[str, str]:
    token = token if token is not None else os.environ.get(ENV_TOKEN)
    return {"X-Auth-Token": token} if token else {}


class _SidecarEndpoint:
    def __init__(self, base_url: str, timeout: float = 60.0, token: str | None = None):
        if not base_url:
            raise ValueError("sidecar base URL must be non-empty")
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()
        self._session.headers.update(_auth_headers(token))

    def _post(self, route: str, payload: dict, error_cls: type[Exception]) -> dict:
        url = f"{self.base_url}{route}"
        try:
            response = self._session.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerTransportError(f"sidecar unreachable at {url}: {exc}") from exc
        if response.status_code in _PROTOCOL_STATUS:
            raise error_cls(f"sidecar rejected request ({response.status_code}): {response.text[:500]}")
        if response.status_code != 200:
            raise ScorerTransportError(f"sidecar error {response.status_code} at {url}: {response.text[:500]}")
        try:
            body = response.json()
        except ValueError as exc:
            raise error_cls(f"sidecar returned non-JSON body from {url}") from exc
        if not isinstance(body, dict):
            raise error_cls(f"sidecar returned non-object body from {url}")
        return body


class SidecarScorer(_SidecarEndpoint):
    """Pair scorer speaking the sidecar /score protocol."""

    def __init__(
        self,
        base_url: str,
        model_id: str = "default",
        timeout: float = 60.0,
        token: str | None = None,
    ):
        super().__init__(base_url, timeout=timeout, token=token)
        self.model_id = model_id
        self.scorer_id = f"sidecar:{model_id}"

    def score_batch(self, kind: str, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if kind not in KIND_TO_WIRE:
            raise ValueError(f"unknown kind {kind!r}")
        body = self._post(
            "/score",
            {"kind": KIND_TO_WIRE[kind], "pairs": [[a, b] for a, b in pairs], "model_id": self.model_id},
            ScorerProtocolError,
        )
        scores = body.get("scores")
        if not isinstance(scores, list):
            raise ScorerProtocolError("sidecar /score reply has no scores list")
        if len(scores) != len(pairs):
            raise ScorerProtocolError(f"sidecar returned {len(scores)} scores for {len(pairs)} pairs")
        return [float(s) for s in scores]


class SidecarClassifier(_SidecarEndpoint):
    """Classifier speaking the sidecar /classify protocol."""

    classifier_id = "sidecar:classifier"

    def predict(self, sentences: Sequence[Sentence]) -> list[LabelPrediction]:
        if not sentences:
            return []
        body = self._post("/classify", {"sentences": [s.text for s in sentences]}, ScorerProtocolError)
        results = body.get("results")
        if not isinstance(results, list) or len(results) != len(sentences):
            raise ScorerProtocolError("sidecar /classify reply does not match request length")
        out = []
        for sentence, result in zip(sentences, results):
            if not isinstance(result, dict) or "decision" not in result or "rationale" not in result:
                raise ScorerProtocolError(f"sidecar /classify result malformed for {sentence.id}")
            decision = bool(result["decision"])
            rationale = bool(result["rationale"])
            scores = result.get("scores") or {}
            out.append(
                LabelPrediction(
                    sentence_id=sentence.id,
                    decision=decision,
                    rationale=rationale,
                    decision_score=float(scores.get("decision", 1.0 if decision else 0.0)),
                    rationale_score=float(scores.get("rationale", 1.0 if rationale else 0.0)),
                    classifier_id=self.classifier_id,
                )
            )
        return out


class SidecarExtractor(_SidecarEndpoint):
    """Extractor speaking the sidecar /extract protocol.

    An unparseable model reply comes back from the sidecar as nulls plus a
    raw echo; the echo is what distinguishes "could not parse" (malformed)
    from a genuine "no entities here" null reply.
    """

    def __init__(
        self,
        base_url: str,
        prompt_id: str = "default",
        timeout: float = 60.0,
        token: str | None = None,
    ):
        super().__init__(base_url, timeout=timeout, token=token)
        self.prompt_id = prompt_id
        self.extractor_id = f"sidecar:{prompt_id}"

    def extract(self, text: str) -> ExtractorReply:
        try:
            body = self._post("/extract", {"sentences": [text], "prompt_id": self.prompt_id}, ExtractorError)
        except ScorerTransportError as exc:
            raise ExtractorError(str(exc)) from exc
        results = body.get("results")
        if not isinstance(results, list) or len(results) != 1 or not isinstance(results[0], dict):
            raise ExtractorError("sidecar /extract reply does not match request length")
        result = results[0]
        decision = result.get("decision")
        rationale = result.get("rationale")
        for name, value in (("decision", decision), ("rationale", rationale)):
            if value is not None and not isinstance(value, str):
                raise ExtractorError(f"sidecar /extract {name} field is not a string")
        malformed = decision is None and rationale is None and bool(result.get("raw"))
        return ExtractorReply(decision=decision, rationale=rationale, malformed=malformed)


def healthz(base_url: str, timeout: float = 10.0, token: str | None = None) -> dict:
    """Probe the sidecar health endpoint; returns its status document."""
    url = f"{base_url.rstrip('/')}/healthz"
    try:
        response = requests.get(url, timeout=timeout, headers=_auth_headers(token))
    except requests.RequestException as exc:
        raise ScorerTransportError(f"sidecar unreachable at {url}: {exc}") from exc
    if response.status_code != 200:
        raise ScorerTransportError(f"sidecar health check failed ({response.status_code})")
    return response.json()
