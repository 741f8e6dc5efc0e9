"""Trend and evolutionary wavelet spectrum estimation for locally stationary series.

The usual entry points are :func:`estimate_ews` (spectrum of a possibly
trended series via differencing), :func:`estimate_trend` (wavelet-threshold
trend with spectrum-derived variances), :func:`lacv` and :func:`simulate_lsw`.
"""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (AllNegativeRow, ConfigError, DepthExceeded, KindMismatch, NonDyadicLength,
                     NumericError, SeriesTooShort, ShapeMismatch, SingularMatrix, TLSWError,
                     UnknownPreset, UnsupportedFilter, UnsupportedOrder)
from .kernels import BACKEND
from .lacv import LACVEstimate, lacv, local_acf, local_variance
from .operators import (OperatorMatrix, cross_matrix, diff_correction_matrix,
                        inner_product_matrix, invert, seasonal_correction_matrix)
from .simulation import SimConfig, simulate_components, simulate_lsw
from .spectral import SpectralConfig, SpectrumEstimate, estimate_ews
from .transforms import difference, ndwt, periodogram, seasonal_difference, ti_reconstruct
from .trend import TrendConfig, TrendEstimate, estimate_trend, estimate_trend_global_baseline
from .wavelets import autocorrelation_wavelets, discrete_wavelets, parse_filter

__all__ = [
    "__version__", "BACKEND",
    "TLSWError", "ConfigError", "NumericError", "UnsupportedFilter", "UnsupportedOrder",
    "UnknownPreset", "KindMismatch", "DepthExceeded", "SeriesTooShort", "NonDyadicLength",
    "ShapeMismatch", "SingularMatrix", "AllNegativeRow",
    "parse_filter", "discrete_wavelets", "autocorrelation_wavelets",
    "OperatorMatrix", "inner_product_matrix", "diff_correction_matrix",
    "seasonal_correction_matrix", "cross_matrix", "invert",
    "ndwt", "ti_reconstruct", "periodogram", "difference", "seasonal_difference",
    "SpectralConfig", "SpectrumEstimate", "estimate_ews",
    "TrendConfig", "TrendEstimate", "estimate_trend", "estimate_trend_global_baseline",
    "LACVEstimate", "lacv", "local_variance", "local_acf",
    "SimConfig", "simulate_lsw", "simulate_components",
]
