"""Iterated prime-indexed primes, finite differences, and gridplots."""

from .diffs import (
    DiffSpec,
    Series,
    binomial,
    diff_range,
    finite_difference,
    quantize256,
    sign_filter,
)
from .engine import CacheSummary, PrimeEngine, SieveSegment, UniverseBoundError
from .pips import (
    PipSeries,
    PipSpec,
    broughan_barnett_approx,
    pip,
    pip_asymptotic,
    pip_lower_bound,
    pip_range,
)
from .render import (
    Colormap,
    GridImage,
    GridRow,
    colormap_jet,
    colormap_sign,
    read_ppm,
    render_gridplot,
    write_ppm,
)
from .stats import (
    FitResult,
    Histogram,
    RollingMoments,
    corr_matrix,
    count_zeros,
    excess_kurtosis,
    exponential_fit,
    fit_gaussian,
    fit_laplace,
    histogram,
    mod6_dip_score,
    ols_fit,
    outlier_census,
    pearson,
    rolling_moments,
    zero_density_fit,
)
from .transforms import FiniteDifference, PipFeatures, Quantize256, SignFilter

__version__ = "0.1.0"
