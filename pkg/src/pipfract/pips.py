"""Iterated, index-shifted prime-indexed primes and their growth bounds.

A prime-indexed prime of order k is obtained by applying "take the prime
at this index" k times; a shift s displaces the index set at every
nesting level. Order 0 is the identity row extended to s + i so that the
composition law keeps holding for shifted sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import PrimeEngine, UniverseBoundError

DEFAULT_MAX_ORDER = 8


@dataclass(frozen=True)
class PipSpec:
    """Parameters naming one PIP sequence: nesting order k and shift s."""

    k: int
    s: int = 0
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("prime-index order k must be >= 0")
        if self.k > self.max_order:
            raise ValueError(f"prime-index order {self.k} exceeds max {self.max_order}")
        if self.s < 0:
            raise ValueError("index-set shift s must be >= 0")


@dataclass(frozen=True)
class PipSeries:
    """A contiguous run of PIP values starting at index ``start``."""

    spec: PipSpec
    start: int
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def pip(engine: PrimeEngine, spec: PipSpec, i: int) -> int:
    """Value of the order-k, shift-s prime-indexed prime at index i."""
    if i < 1:
        raise ValueError("index i must be >= 1")
    x = i
    if spec.k == 0:
        return spec.s + x
    for _ in range(spec.k):
        x = engine.nth_prime(spec.s + x)
    return x


def pip_range(engine: PrimeEngine, spec: PipSpec, i_lo: int, i_hi: int) -> PipSeries:
    """PIP values for every index in [i_lo, i_hi].

    Each nesting level is resolved with one streaming pass over the sieve,
    feeding the sorted results of the previous level as index queries.
    """
    if not 1 <= i_lo <= i_hi:
        raise ValueError(f"need 1 <= i_lo <= i_hi, got {i_lo}..{i_hi}")
    vals = np.arange(i_lo, i_hi + 1, dtype=np.int64)
    if spec.k == 0:
        return PipSeries(spec=spec, start=i_lo, values=spec.s + vals)
    for _ in range(spec.k):
        try:
            vals = engine.resolve_indices(spec.s + vals)
        except UniverseBoundError as exc:
            # level index lists preserve order, so the failing query
            # position names the offending series index exactly
            if exc.position is None:
                raise
            i_bad = i_lo + exc.position
            raise UniverseBoundError(
                f"value at index {i_bad} (order k={spec.k}, shift s={spec.s}) "
                f"exceeds universe bound {engine.universe_bound}",
                position=exc.position,
            ) from None
    return PipSeries(spec=spec, start=i_lo, values=vals)


def broughan_barnett_approx(n: int) -> float:
    """Closed-form approximation to the order-2 PIP at index n.

    Evaluates n*log(n)**2 + 3n*log(n)*log(log(n)) in natural logs, the
    leading terms of the known asymptotic expansion.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    ln = math.log(n)
    return n * ln * ln + 3.0 * n * ln * math.log(ln)


def pip_asymptotic(n: int, k: int) -> float:
    """Leading-order growth n*log(n)**k of the order-k PIP at index n."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return float(n)
    if n < 2:
        raise ValueError("n must be >= 2")
    return n * math.log(n) ** k


def pip_lower_bound(n: int, k: int) -> float:
    """Iterated Dusart-style lower bound for the order-k PIP at index n.

    Applies f(x) = x*(log(x) + log(log(x)) - 1) k times; each application
    lower-bounds one more level of prime indexing.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    if k < 1:
        raise ValueError("k must be >= 1")
    x = float(n)
    for _ in range(k):
        lx = math.log(x)
        x = x * (lx + math.log(lx) - 1.0)
    return x
