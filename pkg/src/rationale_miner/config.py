"""Run configuration: one JSON file, per-flag overrides, fixed defaults.

Precedence is flag > config file > default; the sidecar URL additionally
falls back to the RATIONALE_SIDECAR_URL environment variable when neither
flag nor config provides it. The resolved configuration is a plain value
object whose canonical JSON form is hashed into run manifests.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import UsageError
from .scoring import Thresholds, preset_thresholds

BACKENDS = ("baseline", "sidecar")

ENV_URL = "RATIONALE_SIDECAR_URL"

# Keys a config file may set; anything else is a typo worth failing on.
_CONFIG_KEYS = {
    "project",
    "input",
    "graph",
    "reports_dir",
    "thresholds_preset",
    "dd_similar",
    "dd_contradicts",
    "rr",
    "classifier",
    "extractor",
    "backend",
    "sidecar_url",
    "batch_size",
    "seed",
    "parallelism",
    "atomic_only",
    "keep_raw_scores",
}


@dataclass(frozen=True)
class RunConfig:
    project: str = ""
    input_path: str | None = None
    graph_path: str | None = None
    reports_dir: str = "reports"
    thresholds_preset: str = "oom"
    thresholds: Thresholds = field(default_factory=Thresholds)
    classifier: str = "baseline"
    extractor: str = "baseline"
    backend: str = "baseline"
    sidecar_url: str | None = None
    batch_size: int = 2000
    seed: int = 0
    parallelism: int = 4
    atomic_only: bool = False
    keep_raw_scores: bool = False

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise UsageError(f"unknown backend {self.backend!r} (choose from {', '.join(BACKENDS)})")
        if self.batch_size < 1:
            raise UsageError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.parallelism < 1:
            raise UsageError(f"parallelism must be >= 1, got {self.parallelism}")
        needs_sidecar = self.backend == "sidecar" or self.classifier == "sidecar" or self.extractor == "sidecar"
        if needs_sidecar and not self.sidecar_url:
            raise UsageError(
                "sidecar_url is required when the sidecar backend, classifier, or extractor "
                f"is selected (set --sidecar-url, the config key, or ${ENV_URL})"
            )

    def to_dict(self) -> dict:
        return {
            "project": self.project,
            "input": self.input_path,
            "graph": self.graph_path,
            "reports_dir": self.reports_dir,
            "thresholds_preset": self.thresholds_preset,
            "thresholds": self.thresholds.to_dict(),
            "classifier": self.classifier,
            "extractor": self.extractor,
            "backend": self.backend,
            "sidecar_url": self.sidecar_url,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "parallelism": self.parallelism,
            "atomic_only": self.atomic_only,
            "keep_raw_scores": self.keep_raw_scores,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must contain a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise UsageError(f"config file {path} has unknown keys: {', '.join(unknown)}")
    return data


def _pick(flag: Any, config: Mapping[str, Any], key: str, default: Any) -> Any:
    if flag is not None:
        return flag
    if key in config and config[key] is not None:
        return config[key]
    return default


def resolve_config(args: Any, config_file: Mapping[str, Any] | None = None) -> RunConfig:
    """Merge flags, config file, environment, and defaults into one RunConfig.

    ``args`` is an argparse namespace whose unset optional flags are None.
    """
    cfg = dict(config_file or {})

    preset_name = _pick(getattr(args, "thresholds_preset", None), cfg, "thresholds_preset", "oom")
    try:
        base = preset_thresholds(preset_name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        thresholds = Thresholds(
            dd_similar=float(_pick(getattr(args, "dd_similar", None), cfg, "dd_similar", base.dd_similar)),
            dd_contradicts=float(
                _pick(getattr(args, "dd_contradicts", None), cfg, "dd_contradicts", base.dd_contradicts)
            ),
            rr=float(_pick(getattr(args, "rr", None), cfg, "rr", base.rr)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    sidecar_url = _pick(getattr(args, "sidecar_url", None), cfg, "sidecar_url", os.environ.get(ENV_URL))

    # Store-true flags are False (not None) when unset; config may still turn them on.
    atomic_only = bool(getattr(args, "atomic_only", False) or cfg.get("atomic_only", False))
    keep_raw = bool(getattr(args, "keep_raw_scores", False) or cfg.get("keep_raw_scores", False))

    return RunConfig(
        project=str(_pick(getattr(args, "project", None), cfg, "project", "")),
        input_path=_pick(getattr(args, "input", None), cfg, "input", None),
        graph_path=_pick(getattr(args, "graph", None), cfg, "graph", None),
        reports_dir=str(_pick(getattr(args, "reports_dir", None), cfg, "reports_dir", "reports")),
        thresholds_preset=preset_name,
        thresholds=thresholds,
        classifier=str(_pick(getattr(args, "classifier", None), cfg, "classifier", "baseline")),
        extractor=str(_pick(getattr(args, "extractor", None), cfg, "extractor", "baseline")),
        backend=str(_pick(getattr(args, "backend", None), cfg, "backend", "baseline")),
        sidecar_url=sidecar_url,
        batch_size=int(_pick(getattr(args, "batch_size", None), cfg, "batch_size", 2000)),
        seed=int(_pick(getattr(args, "seed", None), cfg, "seed", 0)),
        parallelism=int(_pick(getattr(args, "parallelism", None), cfg, "parallelism", 4)),
        atomic_only=atomic_only,
        keep_raw_scores=keep_raw,
    )
