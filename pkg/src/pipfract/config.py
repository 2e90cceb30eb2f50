"""Run configuration: defaults, config file, environment, flag overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .engine import (
    DEFAULT_CHECKPOINT_STRIDE,
    DEFAULT_SEGMENT_SPAN,
    DEFAULT_UNIVERSE_BOUND,
    PrimeEngine,
)

CACHE_ENV_VAR = "PIPFRACT_CACHE"


@dataclass
class RunConfig:
    universe_bound: int = DEFAULT_UNIVERSE_BOUND
    cache_path: str | None = None
    segment_span: int = DEFAULT_SEGMENT_SPAN
    checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE
    output_dir: str = "."
    threads: int = 1

    def __post_init__(self):
        if self.universe_bound < 2:
            raise ValueError("universe_bound must be at least 2")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


_INT_KEYS = {"universe_bound", "segment_span", "checkpoint_stride", "threads"}
_KEYS = {f.name for f in fields(RunConfig)}


def parse_config_file(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = int(value) if key in _INT_KEYS else value
    return out


def resolve_config(config_file=None, env=None, **overrides) -> RunConfig:
    """Merge defaults, config file, environment, and explicit overrides.

    Precedence, lowest to highest: defaults, config file, PIPFRACT_CACHE
    (cache path only), command-line overrides.
    """
    env = os.environ if env is None else env
    merged: dict = {}
    if config_file is not None:
        merged.update(parse_config_file(config_file))
    if env.get(CACHE_ENV_VAR):
        merged["cache_path"] = env[CACHE_ENV_VAR]
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**merged)


def make_engine(cfg: RunConfig) -> PrimeEngine:
    """Build an engine from a RunConfig, loading its cache if present."""
    engine = PrimeEngine(
        universe_bound=cfg.universe_bound,
        segment_span=cfg.segment_span,
        checkpoint_stride=cfg.checkpoint_stride,
        threads=cfg.threads,
    )
    if cfg.cache_path and os.path.exists(cfg.cache_path):
        engine.load_cache(cfg.cache_path)
    return engine
