"""Differencing, the periodic non-decimated wavelet transform and its inverse.

The transform uses the convention ``d_{j,k} = sum_t x_t psi_{j,k-t}`` with
indices taken modulo ``T``; it is computed with the a trous filter bank
``d_{-j} = g_(2**(j-1)) * h_(2**(j-2)) * ... * h_1 * x`` where ``f_(s)`` is the
filter ``f`` dilated by ``s`` and ``*`` is circular convolution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DepthExceeded, NonDyadicLength, SeriesTooShort, ShapeMismatch
from .wavelets import WaveletFilter, support_length, wavelet_origin


@dataclass(frozen=True)
class TimeSeries:
    """Real samples with an optional time origin and sampling interval."""

    values: np.ndarray = field(repr=False)
    origin: float | None = None
    step: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ShapeMismatch("a time series must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series contains non-finite values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def dyadic_level(n: int) -> int:
    """``log2(n)`` for a power of two, else :class:`NonDyadicLength`."""
    n = int(n)
    if n < 2 or n & (n - 1):
        raise NonDyadicLength(f"length {n} is not a power of two")
    return n.bit_length() - 1


def _as_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeMismatch("expected a one-dimensional series")
    return x


PAD_MODES = ("zero", "repeat")


def _pad_left(y: np.ndarray, lost: int, pad: str) -> np.ndarray:
    if pad == "zero":
        y[:lost] = 0.0
    elif pad == "repeat":
        y[:lost] = y[lost]
    else:
        raise ValueError(f"pad must be one of {PAD_MODES}, got {pad!r}")
    return y


def difference(x, order: int = 1, pad: str = "zero") -> np.ndarray:
    """``order``-th difference ``sum_k (-1)**k C(n, k) x_{t-k}``, length preserved.

    The first ``order`` positions, where the difference is undefined, are set
    to zero (``pad="zero"``) or repeat the first valid value (``pad="repeat"``).
    """
    x = _as_series(x)
    n = int(order)
    if n < 1:
        raise ValueError("order must be >= 1")
    if x.size <= n:
        raise SeriesTooShort(f"need more than {n} samples, got {x.size}")
    y = np.zeros_like(x)
    # repeated first differences keep constants exactly zero in floating point
    y[n:] = np.diff(x, n)
    return _pad_left(y, n, pad)


def seasonal_difference(x, period: int, pad: str = "zero") -> np.ndarray:
    """Lag-``period`` difference ``x_t - x_{t-L}``, length preserved by left padding."""
    x = _as_series(x)
    L = int(period)
    if L < 1:
        raise ValueError("period must be >= 1")
    if x.size <= L:
        raise SeriesTooShort(f"need more than {L} samples, got {x.size}")
    y = np.empty_like(x)
    y[L:] = x[L:] - x[:-L]
    return _pad_left(y, L, pad)


def boundary_margins(filt: WaveletFilter, depth: int) -> tuple[int, int]:
    """Number of leading and trailing positions whose coefficient at any of the
    finest ``depth`` scales reaches across the series ends (and so wraps)."""
    lo = wavelet_origin(filt, -depth)
    hi = lo + support_length(filt, -depth) - 1
    return max(hi, 0), max(-lo, 0)


def interior_mask(filt: WaveletFilter, depth: int, T: int) -> np.ndarray:
    """Boolean mask of time indices unaffected by the periodic wrap."""
    left, right = boundary_margins(filt, depth)
    m = np.zeros(T, dtype=bool)
    m[left:T - right] = True
    return m


@dataclass(frozen=True, eq=False)
class NDWTCoefficients:
    """Detail coefficients ``coeffs[j, k]`` (row 0 is scale -1) plus the smooth remainder."""

    filter: WaveletFilter
    coeffs: np.ndarray = field(repr=False)
    smooth: np.ndarray = field(repr=False)
    boundary: str = "periodic"

    @property
    def depth(self) -> int:
        return self.coeffs.shape[-2]

    @property
    def length(self) -> int:
        return self.coeffs.shape[-1]

    def replace(self, coeffs=None, smooth=None) -> "NDWTCoefficients":
        return NDWTCoefficients(
            self.filter,
            self.coeffs if coeffs is None else np.asarray(coeffs, dtype=float),
            self.smooth if smooth is None else np.asarray(smooth, dtype=float),
            self.boundary,
        )


def _check_depth(T: int, depth: int, dyadic: bool = True) -> None:
    J = dyadic_level(T) if dyadic else int(np.log2(T))
    if depth < 1 or depth > J:
        raise DepthExceeded(f"depth {depth} not in 1..{J} for length {T}")


def _detail_lead(filt: WaveletFilter, step: int) -> int:
    """Samples by which the high-pass origin ``2 - N_h`` leads a causal filter at ``step``."""
    return -filt.high_pass_origin * step


def ndwt_rows(x, filt: WaveletFilter, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched transform of the rows of ``x`` (shape ``(R, T)``).

    Returns ``(details, smooth)`` with shapes ``(depth, R, T)`` and ``(R, T)``.
    """
    c = np.ascontiguousarray(np.atleast_2d(x), dtype=float)
    _check_depth(c.shape[-1], depth)
    h, g = filt.low_pass, filt.high_pass
    details = np.empty((depth,) + c.shape)
    for i in range(depth):
        step = 1 << i
        details[i] = np.roll(kernels.conv_dilated(c, g, step), -_detail_lead(filt, step), axis=-1)
        c = kernels.conv_dilated(c, h, step)
    return details, c


def ndwt(x, filt: WaveletFilter, depth: int) -> NDWTCoefficients:
    """Periodic non-decimated transform of a dyadic-length series to ``depth`` scales."""
    x = _as_series(x)
    d, s = ndwt_rows(x[None, :], filt, depth)
    return NDWTCoefficients(filt, d[:, 0, :], s[0])


def adjoint_rows(details, smooth, filt: WaveletFilter, weight: float = 1.0) -> np.ndarray:
    """``c <- weight * (H^T c + G^T d)`` from the coarsest level down.

    ``weight=1`` is the exact adjoint of :func:`ndwt_rows`; ``weight=1/2`` is
    its basis-averaged inverse.
    """
    details = np.asarray(details, dtype=float)
    c = np.ascontiguousarray(np.atleast_2d(smooth), dtype=float)
    h, g = filt.low_pass, filt.high_pass
    for i in range(details.shape[0] - 1, -1, -1):
        step = 1 << i
        d = np.ascontiguousarray(np.roll(details[i], _detail_lead(filt, step), axis=-1))
        c = kernels.corr_dilated(c, h, step) + kernels.corr_dilated(d, g, step)
        if weight != 1.0:
            c *= weight
    return c


def inverse_rows(details, smooth, filt: WaveletFilter) -> np.ndarray:
    """Basis-averaged inverse of :func:`ndwt_rows`.

    Each level is undone with ``c = (H^T c + G^T d) / 2``, which equals the
    average of the orthogonal reconstructions over all cyclic shifts.
    """
    return adjoint_rows(details, smooth, filt, 0.5)


def ti_reconstruct(c: NDWTCoefficients, scaling_remainder=None) -> np.ndarray:
    """Translation-invariant reconstruction from (possibly modified) coefficients."""
    smooth = c.smooth if scaling_remainder is None else np.asarray(scaling_remainder, dtype=float)
    coeffs = np.asarray(c.coeffs, dtype=float)
    if coeffs.ndim != 2 or smooth.shape != (coeffs.shape[1],):
        raise ShapeMismatch(
            f"coefficients {coeffs.shape} and remainder {smooth.shape} do not conform")
    return inverse_rows(coeffs[:, None, :], smooth[None, :], c.filter)[0]


# ---------------------------------------------------------------------------
# decimated transform (internal; used for DWT shrinkage)

def dwt(x, filt: WaveletFilter, depth: int) -> tuple[list, np.ndarray]:
    """Periodic orthogonal pyramid ``a' [m] = sum_p h_p a[2m+1-p]`` (same for ``g``).

    Level ``i`` coefficient ``m`` equals the non-decimated coefficient at the
    time returned by :func:`dwt_time_index`.
    """
    a = _as_series(x)
    _check_depth(a.size, depth)
    h, g = filt.low_pass, filt.high_pass
    details = []
    for _ in range(depth):
        n = a.size
        idx = (2 * np.arange(n // 2)[:, None] + 1 - np.arange(h.size)[None, :]) % n
        details.append(a[idx] @ g)
        a = a[idx] @ h
    return details, a


def idwt(details, approx, filt: WaveletFilter) -> np.ndarray:
    """Inverse of :func:`dwt`."""
    a = np.asarray(approx, dtype=float)
    h, g = filt.low_pass, filt.high_pass
    for d in reversed(details):
        m = a.size
        n = 2 * m
        out = np.zeros(n)
        idx = (2 * np.arange(m)[:, None] + 1 - np.arange(h.size)[None, :]) % n
        np.add.at(out, idx, a[:, None] * h[None, :] + np.asarray(d)[:, None] * g[None, :])
        a = out
    return a


def dwt_time_index(filt: WaveletFilter, level: int, T: int) -> np.ndarray:
    """Non-decimated time index of each decimated coefficient at scale ``-level``."""
    s = 1 << level
    causal = s * (np.arange(T // s) + 1) - 1
    return (causal - _detail_lead(filt, s // 2)) % T


def periodogram_values(c: NDWTCoefficients) -> np.ndarray:
    return np.square(c.coeffs)


@dataclass(frozen=True, eq=False)
class Periodogram:
    """Squared coefficients ``I[j, k]`` with a record of how they were produced."""

    values: np.ndarray = field(repr=False)
    source: str = "raw"
    smoothed: bool = False

    @property
    def depth(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


def periodogram(c: NDWTCoefficients, source: str = "raw") -> Periodogram:
    """Raw wavelet periodogram ``|d_{j,k}|**2``."""
    return Periodogram(np.square(c.coeffs), source, False)
