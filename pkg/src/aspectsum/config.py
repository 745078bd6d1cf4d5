"""Pipeline configuration loaded from a simple ``key = value`` file."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional


@dataclass
class PipelineConfig:
    # Trigger thresholds
    min_reviews: int = 10
    refresh_fraction: float = 0.10
    # Selection
    cap: int = 200
    top_k: int = 5
    sampling_mode: str = "uniform"  # uniform | recency | recency+verified
    half_life_days: float = 180.0
    seed: int = 0
    # Consolidation
    percentile: float = 0.95
    pinned_threshold: Optional[int] = None
    consolidation_batch_size: int = 100
    # Gateway
    backend: str = "mock"  # mock | http
    endpoint: str = ""
    model_id: str = "mock-model"
    max_attempts: int = 3
    timeout_seconds: float = 60.0
    backoff_base_seconds: float = 1.0
    parallelism: int = 8
    templates_dir: Optional[str] = None
    # Persistence
    store_path: Optional[str] = None
    mapping_store_path: Optional[str] = None
    # Service
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origin: str = "*"
    # Run the pipeline inside the ingest request instead of a worker thread.
    synchronous_pipeline: bool = True


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(raw: str, target_type: type) -> object:
    if target_type is bool:
        try:
            return _BOOL_VALUES[raw.lower()]
        except KeyError:
            raise ValueError(f"expected a boolean, got {raw!r}") from None
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def load_config(path: str | Path) -> PipelineConfig:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    field_map = {f.name: f for f in fields(PipelineConfig)}
    optional_ints = {"pinned_threshold"}
    optional_strs = {"templates_dir", "store_path", "mapping_store_path"}
    values: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in field_map:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in optional_ints:
            values[key] = int(raw) if raw else None
        elif key in optional_strs:
            values[key] = raw or None
        else:
            values[key] = _coerce(raw, type(getattr(PipelineConfig, key)))
    return PipelineConfig(**values)  # type: ignore[arg-type]
