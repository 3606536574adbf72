"""Deterministic CPU scoring backends and the per-kind model registry.

Both backends are pure functions of their input texts, so the service
stays stateless across requests and identical requests always score
identically. They are registered under configurable model ids; swapping
in a heavier model is a registry change, not a protocol change.

Similarity: signed feature hashing of word tokens into a fixed-dimension
vector, then cosine. Raw cosine of hashed vectors can go negative, so it
is clamped at 0; the mapping choice is reported in the backend info so
callers can log it.

Contradiction: a lexical score from opposing action verbs, negation
asymmetry, and shared-subject overlap. The reported score is the max over
both orderings of the pair, which makes it symmetric by construction.
"""

from __future__ import annotations

import hashlib
import re
import threading
from typing import Sequence

import numpy as np

SIMILARITY = "similarity"
CONTRADICTION = "contradiction"
KINDS = (SIMILARITY, CONTRADICTION)

_WORD = re.compile(r"[a-z0-9_]+")

# Verbs that assert a change in one direction vs. verbs that assert the
# opposite; a pair drawing one token from each side opposes itself.
_FORWARD = frozenset(
    "add adds added adding introduce introduces introduced enable enables enabled "
    "start starts started allow allows allowed keep keeps kept use uses used "
    "include includes included".split()
)
_REVERSE = frozenset(
    "remove removes removed removing delete deletes deleted drop drops dropped "
    "disable disables disabled stop stops stopped avoid avoids avoided replace "
    "replaces replaced replacing revert reverts reverted forbid forbids skip skips "
    "exclude excludes excluded".split()
)
_NEGATION = frozenset("not no never none dont cannot cant wont without".split())
_STOPWORDS = frozenset(
    "the a an this that these those it its is was are were be been to of in on "
    "for by and or with as at from we i you".split()
)


def word_tokens(text: str) -> list[str]:
    return _WORD.findall(text.lower())


class HashEmbeddingSimilarity:
    """Cosine over signed hashed token-count vectors, clamped into [0,1]."""

    kind = SIMILARITY

    def __init__(self, model_id: str, dim: int = 256):
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self.model_id = model_id
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}
        # One inference at a time per backend instance.
        self.lock = threading.Lock()

    def info(self) -> dict:
        return {
            "kind": self.kind,
            "model_id": self.model_id,
            "backend": "hash-embedding",
            "dim": self.dim,
            "score_mapping": "clamp0",
        }

    def _vector(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in word_tokens(text):
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            index = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] & 1 else -1.0
            vec[index] += sign
        if len(self._cache) > 200_000:
            self._cache.clear()
        self._cache[text] = vec
        return vec

    def score_pairs(self, pairs: Sequence[Sequence[str]]) -> list[float]:
        scores = []
        for a, b in pairs:
            if a == b:
                scores.append(1.0)
                continue
            va, vb = self._vector(a), self._vector(b)
            norm = float(np.linalg.norm(va)) * float(np.linalg.norm(vb))
            if norm == 0.0:
                # One side has no tokens; the both-empty case hit a == b
                # above only for byte-identical texts, so score overlap 0.
                scores.append(0.0)
                continue
            cosine = float(np.dot(va, vb)) / norm
            scores.append(min(1.0, max(0.0, cosine)))
        return scores


class LexicalContradiction:
    """Opposing-verb / negation-asymmetry score, symmetric via max-of-directions."""

    kind = CONTRADICTION

    def __init__(self, model_id: str):
        self.model_id = model_id
        self.lock = threading.Lock()

    def info(self) -> dict:
        return {
            "kind": self.kind,
            "model_id": self.model_id,
            "backend": "lexical-opposition",
            "score_mapping": "direct",
        }

    def _directional(self, premise: str, hypothesis: str) -> float:
        ta = set(word_tokens(premise))
        tb = set(word_tokens(hypothesis))
        shared = (ta & tb) - _STOPWORDS
        opposed = bool(ta & _FORWARD and tb & _REVERSE) or bool(ta & _REVERSE and tb & _FORWARD)
        negation_mismatch = bool(ta & _NEGATION) != bool(tb & _NEGATION)
        if opposed and shared:
            return 0.6 + 0.3 * min(1.0, len(shared) / 4.0)
        if negation_mismatch and len(shared) >= 2:
            return 0.7
        if len(shared) >= 3:
            return 0.35
        return 0.02 if shared else 0.0

    def score_pairs(self, pairs: Sequence[Sequence[str]]) -> list[float]:
        return [max(self._directional(a, b), self._directional(b, a)) for a, b in pairs]


def build_registry(similarity_model: str, contradiction_model: str) -> dict:
    """Per-kind model tables; "default" aliases the configured backend."""
    similarity = HashEmbeddingSimilarity(similarity_model)
    contradiction = LexicalContradiction(contradiction_model)
    return {
        SIMILARITY: {similarity_model: similarity, "default": similarity},
        CONTRADICTION: {contradiction_model: contradiction, "default": contradiction},
    }
