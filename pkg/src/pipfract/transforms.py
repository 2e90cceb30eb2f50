"""Estimator-style wrappers so the series operators compose in pipelines.

Each transformer is stateless: ``fit`` only validates parameters, and
``transform`` applies the corresponding functional operator columnwise.
Columns are treated as independent series, which matches stacking one
sequence per prime-index order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import diffs
from .engine import PrimeEngine
from .pips import PipSpec, pip_range


def check_indices(X) -> np.ndarray:
    """Validate a 1-D (or single-column) array of positive indices."""
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D index array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("index array is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError("indices must be integers")
    arr = arr.astype(np.int64)
    if arr.min() < 1:
        raise ValueError("indices must be >= 1")
    return arr


def check_columns(X) -> tuple[np.ndarray, bool]:
    """Coerce input to a 2-D int64 column matrix; report if it was 1-D."""
    arr = np.asarray(X)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D input, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("input is empty")
    return arr.astype(np.int64), squeeze


class PipFeatures(BaseEstimator, TransformerMixin):
    """Expand an index column into PIP values, one column per order.

    transform(X) maps indices i to columns q(i) for each requested
    prime-index order, all sharing the configured index-set shift.
    """

    def __init__(self, engine: PrimeEngine | None = None, orders=(1,), shift: int = 0):
        self.engine = engine
        self.orders = orders
        self.shift = shift

    def _check(self):
        if self.engine is None:
            raise ValueError("PipFeatures requires an engine")
        orders = tuple(int(k) for k in self.orders)
        if not orders:
            raise ValueError("orders must be nonempty")
        if any(k < 0 for k in orders):
            raise ValueError("orders must be >= 0")
        if self.shift < 0:
            raise ValueError("shift must be >= 0")
        return orders

    def fit(self, X=None, y=None):
        self._check()
        return self

    def transform(self, X) -> np.ndarray:
        orders = self._check()
        idx = check_indices(X)
        uniq, inverse = np.unique(idx, return_inverse=True)
        out = np.empty((idx.size, len(orders)), dtype=np.int64)
        vals = uniq
        level = 0
        for col, k in sorted(zip(range(len(orders)), orders), key=lambda t: t[1]):
            while level < k:
                vals = self.engine.resolve_indices(self.shift + vals)
                level += 1
            col_vals = self.shift + uniq if k == 0 else vals
            out[:, col] = col_vals[inverse]
        return out


class FiniteDifference(BaseEstimator, TransformerMixin):
    """Forward finite difference of each column; output is shorter."""

    def __init__(self, order: int = 2, spacing: int = 1):
        self.order = order
        self.spacing = spacing

    def fit(self, X=None, y=None):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.spacing < 1:
            raise ValueError("spacing must be >= 1")
        return self

    def transform(self, X) -> np.ndarray:
        self.fit()
        arr, squeeze = check_columns(X)
        cols = [
            diffs.finite_difference(arr[:, j], self.order, self.spacing)
            for j in range(arr.shape[1])
        ]
        out = np.stack(cols, axis=1)
        return out[:, 0] if squeeze else out


class SignFilter(BaseEstimator, TransformerMixin):
    """Elementwise sign, mapping every value to -1, 0, or 1."""

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        arr, squeeze = check_columns(X)
        out = np.sign(arr)
        return out[:, 0] if squeeze else out


class Quantize256(BaseEstimator, TransformerMixin):
    """Rescale each column onto integer levels 0..255 by its own range.

    Stateless by design: the affine map always uses the min and max of
    the data being transformed, mirroring the per-sequence scaling used
    for the 256-level plots.
    """

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        arr, squeeze = check_columns(X)
        cols = [diffs.quantize256(arr[:, j]) for j in range(arr.shape[1])]
        out = np.stack(cols, axis=1)
        return out[:, 0] if squeeze else out


def pip_difference_matrix(engine: PrimeEngine, orders, T: int,
                          shift: int = 0, order: int = 2, spacing: int = 1) -> np.ndarray:
    """Differenced PIP columns for indices 1..T, one column per k.

    Convenience composition of PipFeatures and FiniteDifference used by
    the correlation and rendering front ends.
    """
    pipeline_input = np.arange(1, T + order * spacing + 1, dtype=np.int64)
    feats = PipFeatures(engine=engine, orders=orders, shift=shift).transform(pipeline_input)
    return FiniteDifference(order=order, spacing=spacing).transform(feats)
