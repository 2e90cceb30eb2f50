"""Shared fixtures: engines at two scales and independent prime oracles.

The full-scale engine drives the acceptance suite. Its checkpoint cache
is built once into a persistent directory (.pipfract-cache next to the
repo root, or $PIPFRACT_TEST_CACHE_DIR) so repeat runs skip the ~1 minute
sieve; the first run builds it automatically.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from pipfract.engine import PrimeEngine

FULL_UNIVERSE = 32_000_000_000
FULL_CACHE_LIMIT = 30_500_000_000
FULL_CACHE_STRIDE = 20_000


def _cache_dir() -> Path:
    env = os.environ.get("PIPFRACT_TEST_CACHE_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / ".pipfract-cache"


@pytest.fixture(scope="session")
def big_cache_path() -> Path:
    """Checkpoint cache covering the full universe, built on first use."""
    path = _cache_dir() / "primes-30500M-s20k.pipc"
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        engine = PrimeEngine(
            universe_bound=FULL_UNIVERSE,
            checkpoint_stride=FULL_CACHE_STRIDE,
            threads=2,
        )
        engine.build_cache(FULL_CACHE_LIMIT, path)
    return path


@pytest.fixture(scope="session")
def big_engine(big_cache_path) -> PrimeEngine:
    """Full-scale engine backed by the persistent checkpoint cache."""
    return PrimeEngine(universe_bound=FULL_UNIVERSE, cache_path=big_cache_path)


@pytest.fixture(scope="session")
def small_engine() -> PrimeEngine:
    """Desk-scale engine for unit tests; no cache, streams from scratch."""
    return PrimeEngine(universe_bound=10**9)


def sieve_oracle(limit: int) -> np.ndarray:
    """All primes <= limit by a plain one-shot sieve (independent oracle)."""
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def trial_division_primes(lo: int, hi: int) -> list[int]:
    """Primes in [lo, hi) by trial division (independent oracle)."""
    out = []
    for n in range(max(lo, 2), hi):
        if n < 4:
            out.append(n)
            continue
        d = 2
        while d * d <= n:
            if n % d == 0:
                break
            d += 1
        else:
            out.append(n)
    return out


@pytest.fixture(scope="session")
def oracle_primes() -> np.ndarray:
    """Primes to 2e6, enough for the first 1e5 by index."""
    return sieve_oracle(2_000_000)
