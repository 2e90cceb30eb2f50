"""Statistics over differenced PIP sequences.

Covers rolling moments, pairwise correlation and regression, histograms
with distribution fits, the mod-6 periodicity score, zero counting with
exponential density fits, and the sign-majority outlier census.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffs import DiffSpec, Series, diff_range
from .engine import PrimeEngine


def _as_floats(series) -> np.ndarray:
    vals = series.values if isinstance(series, Series) else series
    return np.asarray(vals, dtype=np.float64)


@dataclass(frozen=True)
class RollingMoments:
    """Windowed sample moments: window end positions, means, variances."""

    T: int
    w: int
    y: int
    positions: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def rows(self):
        return list(zip(self.positions.tolist(), self.means.tolist(), self.variances.tolist()))


@dataclass(frozen=True)
class FitResult:
    """A fitted model: parameter tuple plus one goodness number.

    ``goodness`` is a log-likelihood for the distribution fits and an
    R-squared for the linear and exponential fits.
    """

    kind: str
    params: tuple[float, ...]
    goodness: float
    dropped: tuple[int, ...] = field(default=())

    _PARAM_NAMES = {
        "laplace": ("mu", "b"),
        "gaussian": ("mu", "sigma"),
        "exponential": ("A", "B"),
        "linear": ("a0", "a1"),
    }

    def as_dict(self) -> dict:
        names = self._PARAM_NAMES[self.kind]
        out = {"kind": self.kind}
        out.update(zip(names, self.params))
        out["goodness"] = self.goodness
        if self.dropped:
            out["dropped"] = list(self.dropped)
        return out


@dataclass(frozen=True)
class Histogram:
    """Half-open bins [edge, edge + width) with one edge exactly at 0."""

    bin_width: float
    origin: float
    centers: np.ndarray
    counts: np.ndarray
    normalization: str

    def rows(self):
        return list(zip(self.centers.tolist(), self.counts.tolist()))


def rolling_moments(series, w: int, y: int) -> RollingMoments:
    """Rolling mean and sample variance over windows of width w, step y.

    A window position i covers the w most recent elements ending at the
    i-th element of the series (1-based); positions run w, w+y, ... while
    they fit. Variance uses the 1/(w-1) convention.
    """
    vals = _as_floats(series)
    T = vals.size
    if w < 2:
        raise ValueError("window width w must be >= 2")
    if y < 1:
        raise ValueError("step y must be >= 1")
    if w > T:
        raise ValueError(f"window width {w} exceeds series length {T}")
    num = (T - w) // y + 1
    positions = w + y * np.arange(num, dtype=np.int64)
    means = np.empty(num)
    variances = np.empty(num)
    for j, i in enumerate(positions):
        window = vals[i - w : i]
        mu = window.mean()
        means[j] = mu
        variances[j] = np.square(window - mu).sum() / (w - 1)
    return RollingMoments(T=T, w=w, y=y, positions=positions, means=means, variances=variances)


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xv = _as_floats(x)
    yv = _as_floats(y)
    if xv.size != yv.size:
        raise ValueError(f"length mismatch: {xv.size} vs {yv.size}")
    if xv.size < 2:
        raise ValueError("need at least 2 points")
    return xv, yv


def pearson(x, y) -> float:
    """Product-moment correlation of two equally long series."""
    xv, yv = _check_pair(x, y)
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sx = float(np.dot(xc, xc))
    sy = float(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for a constant series")
    return float(np.dot(xc, yc) / np.sqrt(sx * sy))


def ols_fit(x, y) -> FitResult:
    """Least-squares line y = a0 + a1*x; goodness is R-squared."""
    xv, yv = _check_pair(x, y)
    xc = xv - xv.mean()
    sx = float(np.dot(xc, xc))
    if sx == 0.0:
        raise ValueError("regression undefined for constant x")
    a1 = float(np.dot(xc, yv) / sx)
    a0 = float(yv.mean() - a1 * xv.mean())
    resid = yv - (a0 + a1 * xv)
    sy = float(np.square(yv - yv.mean()).sum())
    r2 = 1.0 if sy == 0.0 else 1.0 - float(np.square(resid).sum()) / sy
    return FitResult(kind="linear", params=(a0, a1), goodness=r2)


def corr_matrix(engine: PrimeEngine, specs: list[DiffSpec], T: int) -> np.ndarray:
    """Pairwise correlations of differenced PIP series over indices 1..T.

    Every series is generated for indices 1..T after differencing so all
    pairs share a common alignment. The result is symmetric with a unit
    diagonal.
    """
    if T < 2:
        raise ValueError("T must be >= 2")
    series = [diff_range(engine, sp, 1, T).values for sp in specs]
    m = len(series)
    out = np.eye(m)
    for a in range(m):
        for b in range(a + 1, m):
            r = pearson(series[a], series[b])
            out[a, b] = out[b, a] = r
    return out


def histogram(series, bin_width: float, lo: float, hi: float,
              normalization: str = "counts") -> Histogram:
    """Bin values into half-open bins aligned so one left edge is 0.

    Values outside [lo, hi) are ignored. With ``normalization="pdf"``
    counts are scaled so the histogram integrates to 1 over its bins.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if not lo < hi:
        raise ValueError("need lo < hi")
    if normalization not in ("counts", "pdf"):
        raise ValueError(f"unknown normalization {normalization!r}")
    vals = _as_floats(series)
    start = np.floor(lo / bin_width) * bin_width
    nbins = int(np.ceil((hi - start) / bin_width))
    idx = np.floor((vals - start) / bin_width).astype(np.int64)
    inside = (idx >= 0) & (idx < nbins) & (vals >= lo) & (vals < hi)
    counts = np.bincount(idx[inside], minlength=nbins).astype(np.float64)
    centers = start + (np.arange(nbins) + 0.5) * bin_width
    if normalization == "pdf":
        total = counts.sum()
        if total > 0:
            counts = counts / (total * bin_width)
    return Histogram(bin_width=float(bin_width), origin=0.0, centers=centers,
                     counts=counts, normalization=normalization)


def fit_laplace(series) -> FitResult:
    """Maximum-likelihood Laplace fit: location mu, scale b.

    mu is the sample median and b the mean absolute deviation about it;
    goodness is the total log-likelihood.
    """
    vals = _as_floats(series)
    if vals.size < 2:
        raise ValueError("need at least 2 points")
    mu = float(np.median(vals))
    b = float(np.abs(vals - mu).mean())
    if b == 0.0:
        raise ValueError("degenerate sample: all values identical")
    loglik = -vals.size * (np.log(2.0 * b) + 1.0)
    return FitResult(kind="laplace", params=(mu, b), goodness=float(loglik))


def fit_gaussian(series) -> FitResult:
    """Maximum-likelihood-style normal fit with the 1/(N-1) deviation.

    goodness is the total log-likelihood under N(mu, sigma^2).
    """
    vals = _as_floats(series)
    if vals.size < 2:
        raise ValueError("need at least 2 points")
    mu = float(vals.mean())
    sigma = float(vals.std(ddof=1))
    if sigma == 0.0:
        raise ValueError("degenerate sample: all values identical")
    n = vals.size
    loglik = -0.5 * n * np.log(2.0 * np.pi * sigma * sigma) - (n - 1) / 2.0
    return FitResult(kind="gaussian", params=(mu, sigma), goodness=float(loglik))


def excess_kurtosis(series) -> float:
    """Fourth standardized sample moment minus 3."""
    vals = _as_floats(series)
    if vals.size < 4:
        raise ValueError("need at least 4 points")
    centered = vals - vals.mean()
    m2 = float(np.square(centered).mean())
    if m2 == 0.0:
        raise ValueError("degenerate sample: all values identical")
    m4 = float(np.power(centered, 4).mean())
    return m4 / (m2 * m2) - 3.0


def mod6_dip_score(hist: Histogram, max_gap: int = 3) -> float:
    """Fraction of nonzero multiples of 6 whose bin dips below its neighbors.

    Works on unit-width histograms of integer-valued data, where the
    count at integer m is the count of the bin [m, m+1). Each multiple of
    6 is compared against the nearest populated bin on either side, up to
    ``max_gap`` bins away. Second differences of odd primes are always
    even, so the immediately adjacent bins are empty and the nearest
    populated neighbors normally sit two bins out; on data with full
    support this reduces to comparing against the adjacent bins. A
    multiple with no populated neighbor within reach on some side counts
    as not dipping. The histogram must cover at least the values -48..48.
    """
    if hist.bin_width != 1.0:
        raise ValueError("dip score requires bin width 1")
    # left edge of the first bin; edges are integers because of 0-alignment
    start = int(round(hist.centers[0] - 0.5))
    nbins = hist.counts.size
    if start > -48 or start + nbins < 49:
        raise ValueError("histogram must cover at least the values -48..48")

    def nearest(j: int, step: int) -> float | None:
        for d in range(1, max_gap + 1):
            jj = j + step * d
            if not 0 <= jj < nbins:
                return None
            if hist.counts[jj] > 0:
                return float(hist.counts[jj])
        return None

    dips = 0
    considered = 0
    for m in range(-48, 49, 6):
        if m == 0:
            continue
        j = m - start
        if j - 1 < 0 or j + 1 >= nbins:
            continue
        considered += 1
        left = nearest(j, -1)
        right = nearest(j, +1)
        if left is not None and right is not None and hist.counts[j] < min(left, right):
            dips += 1
    return dips / considered


def count_zeros(engine: PrimeEngine, spec: DiffSpec, T: int) -> int:
    """Number of zeros of the differenced PIP sequence over indices 1..T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    vals = diff_range(engine, spec, 1, T).values
    return int(np.count_nonzero(vals == 0))


def exponential_fit(xs, densities, r2_space: str = "log") -> FitResult:
    """Least-squares fit of density = A * exp(B * x) on log(density).

    Zero densities are dropped (and reported in ``dropped``); at least
    three positive points must remain. R-squared is computed in log space
    by default, or against the raw densities with ``r2_space="linear"``.
    """
    if r2_space not in ("log", "linear"):
        raise ValueError(f"unknown r2_space {r2_space!r}")
    xa = np.asarray(xs, dtype=np.float64)
    da = np.asarray(densities, dtype=np.float64)
    if xa.size != da.size:
        raise ValueError("xs and densities must have equal length")
    if (da < 0).any():
        raise ValueError("densities must be nonnegative")
    keep = da > 0
    dropped = tuple(int(x) for x in xa[~keep])
    xa, da = xa[keep], da[keep]
    if xa.size < 3:
        raise ValueError("need at least 3 positive-density points")
    logd = np.log(da)
    slope_b, intercept = np.polyfit(xa, logd, 1)
    A = float(np.exp(intercept))
    B = float(slope_b)
    if r2_space == "log":
        pred = intercept + B * xa
        ss_res = float(np.square(logd - pred).sum())
        ss_tot = float(np.square(logd - logd.mean()).sum())
    else:
        pred = A * np.exp(B * xa)
        ss_res = float(np.square(da - pred).sum())
        ss_tot = float(np.square(da - da.mean()).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(kind="exponential", params=(A, B), goodness=r2, dropped=dropped)


def zero_density_fit(engine: PrimeEngine, n: int, k_range, T_per_k,
                     h: int = 1, s: int = 0, r2_space: str = "log") -> FitResult:
    """Exponential fit of zero density (zeros per sample) against k."""
    ks = list(k_range)
    Ts = list(T_per_k)
    if len(ks) != len(Ts):
        raise ValueError("k_range and T_per_k must have equal length")
    densities = [
        count_zeros(engine, DiffSpec(h=h, n=n, s=s, k=k), T) / T
        for k, T in zip(ks, Ts)
    ]
    return exponential_fit(ks, densities, r2_space=r2_space)


def outlier_census(engine: PrimeEngine, i_max: int, k_min: int, k_max: int,
                   base: DiffSpec) -> tuple[int, list[tuple[int, int]]]:
    """Count grid entries whose sign defies their row's majority.

    For each index i, the signs of the differenced values across
    k = k_min..k_max are polled; zeros do not vote. Entries with a
    nonzero sign opposite the majority are outliers, and rows with a
    tied vote contribute none.
    """
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    if k_min > k_max:
        raise ValueError("k_min must be <= k_max")
    ks = list(range(k_min, k_max + 1))
    signs = np.stack([
        np.sign(diff_range(engine, DiffSpec(h=base.h, n=base.n, s=base.s, k=k),
                           1, i_max).values)
        for k in ks
    ], axis=1)
    outliers: list[tuple[int, int]] = []
    for row in range(i_max):
        pos = int(np.count_nonzero(signs[row] > 0))
        neg = int(np.count_nonzero(signs[row] < 0))
        if pos == neg:
            continue
        minority = -1 if pos > neg else 1
        for col, k in enumerate(ks):
            if signs[row, col] == minority:
                outliers.append((row + 1, k))
    return len(outliers), outliers
