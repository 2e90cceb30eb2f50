"""Forward finite differences of PIP sequences, plus range filters.

The central object is the n-th order, spacing-h forward difference of an
order-k shift-s PIP sequence. Two range reductions used by the fractal
plots live here as well: the three-valued sign filter and the 256-level
quantizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import PrimeEngine
from .pips import PipSpec, pip_range

MAX_DIFF_ORDER = 12


@dataclass(frozen=True)
class DiffSpec:
    """Parameters naming one differenced PIP sequence.

    h: spacing of the difference operator, n: its order, s: index-set
    shift of the underlying PIPs, k: prime-index order.
    """

    h: int = 1
    n: int = 2
    s: int = 0
    k: int = 1

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("spacing h must be >= 1")
        if self.n < 0:
            raise ValueError("difference order n must be >= 0")
        if self.n > MAX_DIFF_ORDER:
            raise ValueError(f"difference order {self.n} exceeds {MAX_DIFF_ORDER}")
        if self.s < 0:
            raise ValueError("shift s must be >= 0")
        if self.k < 0:
            raise ValueError("prime-index order k must be >= 0")


@dataclass(frozen=True)
class Series:
    """A 1-indexed run of signed 64-bit values with its generating spec."""

    values: np.ndarray
    start: int = 1
    spec: DiffSpec | PipSpec | None = None

    def __len__(self) -> int:
        return len(self.values)

    def with_values(self, values: np.ndarray) -> "Series":
        return Series(values=values, start=self.start, spec=self.spec)


def _values_of(series) -> np.ndarray:
    vals = series.values if isinstance(series, Series) else series
    return np.asarray(vals, dtype=np.int64)


def binomial(n: int, m: int) -> int:
    """Exact binomial coefficient C(n, m) for 0 <= m <= n <= 62."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    if n > 62:
        raise ValueError("n must be <= 62 to stay within 64 bits")
    return math.comb(n, m)


def finite_difference(values, n: int, h: int = 1) -> np.ndarray:
    """n-th order forward difference with spacing h.

    out[i] = sum_{m=0}^{n} (-1)^m C(n, m) values[i + (n - m) h], so the
    output is n*h elements shorter than the input. Order 0 copies the
    input. Inputs that could overflow signed 64-bit arithmetic are
    rejected rather than silently wrapped.
    """
    vals = _values_of(values)
    if n < 0:
        raise ValueError("difference order n must be >= 0")
    if h < 1:
        raise ValueError("spacing h must be >= 1")
    if n == 0:
        return vals.copy()
    if vals.size <= n * h:
        raise ValueError(
            f"series of length {vals.size} too short for order {n}, spacing {h}"
        )
    peak = int(np.abs(vals).max(initial=0))
    if peak and peak.bit_length() + n >= 63:
        raise OverflowError(
            f"order-{n} difference of values up to {peak} may overflow int64"
        )
    length = vals.size - n * h
    out = np.zeros(length, dtype=np.int64)
    for m in range(n + 1):
        coeff = (-1) ** m * binomial(n, m)
        shift = (n - m) * h
        out += coeff * vals[shift : shift + length]
    return out


def diff_range(engine: PrimeEngine, spec: DiffSpec, i_lo: int, i_hi: int) -> Series:
    """Differenced PIP values for indices i_lo..i_hi.

    Element i is the order-n spacing-h forward difference of the order-k
    shift-s PIP sequence evaluated at i, so PIPs up to index
    i_hi + n*h are resolved.
    """
    if not 1 <= i_lo <= i_hi:
        raise ValueError(f"need 1 <= i_lo <= i_hi, got {i_lo}..{i_hi}")
    pips = pip_range(
        engine, PipSpec(k=spec.k, s=spec.s), i_lo, i_hi + spec.n * spec.h
    )
    return Series(
        values=finite_difference(pips.values, spec.n, spec.h),
        start=i_lo,
        spec=spec,
    )


def sign_filter(series):
    """Elementwise sign: positive -> 1, zero -> 0, negative -> -1."""
    if isinstance(series, Series):
        return series.with_values(np.sign(series.values))
    return np.sign(_values_of(series))


def quantize256(series):
    """Affine map of [min, max] onto integer levels 0..255.

    The minimum maps to 0 and the maximum to 255; intermediate values are
    rounded to the nearest integer with halves away from zero, so levels
    are reproducible bit for bit. A constant series maps to all zeros.
    """
    vals = _values_of(series)
    if vals.size == 0:
        raise ValueError("cannot quantize an empty series")
    lo = int(vals.min())
    hi = int(vals.max())
    if hi == lo:
        levels = np.zeros(vals.size, dtype=np.int64)
    else:
        scaled = (vals - lo).astype(np.float64) * (255.0 / (hi - lo))
        levels = np.floor(scaled + 0.5).astype(np.int64)
    if isinstance(series, Series):
        return series.with_values(levels)
    return levels
