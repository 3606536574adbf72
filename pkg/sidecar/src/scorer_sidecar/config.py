"""Service configuration, read once from the environment at startup.

Everything operators can vary lives here: which model ids the two scoring
backends are registered under, the device tag reported by health checks,
the upstream completion endpoint and its key, the directory of mounted
prompt assets, the mounted classifier artifact, and the optional shared
auth token. Request size limits are protocol constants, not configuration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_SIMILARITY_MODEL = "SIDECAR_SIMILARITY_MODEL"
ENV_CONTRADICTION_MODEL = "SIDECAR_CONTRADICTION_MODEL"
ENV_DEVICE = "SIDECAR_DEVICE"
ENV_LLM_ENDPOINT = "SIDECAR_LLM_ENDPOINT"
ENV_LLM_API_KEY = "SIDECAR_LLM_API_KEY"
ENV_PROMPT_DIR = "SIDECAR_PROMPT_DIR"
ENV_CLASSIFIER_ARTIFACT = "SIDECAR_CLASSIFIER_ARTIFACT"
ENV_AUTH_TOKEN = "SIDECAR_AUTH_TOKEN"

# Hard cap on any single text in a /score pair; longer texts are rejected
# with 422 rather than truncated.
MAX_TEXT_CHARS = 4000


@dataclass(frozen=True)
class Settings:
    similarity_model: str = "hash-embedding-v1"
    contradiction_model: str = "lexical-nli-v1"
    device: str = "cpu"
    llm_endpoint: str | None = None
    llm_api_key: str | None = None
    prompt_dir: str | None = None
    classifier_artifact: str | None = None
    auth_token: str | None = None


def settings_from_env() -> Settings:
    return Settings(
        similarity_model=os.environ.get(ENV_SIMILARITY_MODEL, "hash-embedding-v1"),
        contradiction_model=os.environ.get(ENV_CONTRADICTION_MODEL, "lexical-nli-v1"),
        device=os.environ.get(ENV_DEVICE, "cpu"),
        llm_endpoint=os.environ.get(ENV_LLM_ENDPOINT),
        llm_api_key=os.environ.get(ENV_LLM_API_KEY),
        prompt_dir=os.environ.get(ENV_PROMPT_DIR),
        classifier_artifact=os.environ.get(ENV_CLASSIFIER_ARTIFACT),
        auth_token=os.environ.get(ENV_AUTH_TOKEN),
    )
