"""Wavelet-threshold trend estimation with spectrum-derived coefficient variances.

Each non-decimated coefficient ``d_{r,s}`` of the series is compared with
``sigma_{r,s} * sqrt(2 ln T)`` where ``sigma_{r,s}**2 = sum_l C[r, l] S_l(s/T)``
and ``C`` is the cross inner-product matrix between the trend wavelet and the
wavelet the spectrum was estimated with.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import operators
from .errors import AllNegativeRow, ConfigError, DepthExceeded, ShapeMismatch
from .operators import OperatorMatrix
from .spectral import DEFAULT_BETA, SpectrumEstimate, default_depth, mad_sigma
from .transforms import (dwt, dwt_time_index, dyadic_level, idwt, ndwt, ti_reconstruct)
from .wavelets import WaveletFilter, autocorr_for, parse_filter

RULES = ("hard", "soft")
TRANSFORMS = ("TI", "DWT")


@dataclass(frozen=True)
class TrendConfig:
    """Settings for :func:`estimate_trend`; ``depth=None`` means ``floor(0.7 log2 T)``."""

    trend_filter: WaveletFilter = field(default_factory=lambda: parse_filter("LA4"))
    depth: int | None = None
    rule: str = "hard"
    transform: str = "TI"

    def __post_init__(self):
        object.__setattr__(self, "trend_filter", parse_filter(self.trend_filter))
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}")
        if self.transform.upper() not in TRANSFORMS:
            raise ConfigError(f"transform must be one of {TRANSFORMS}")
        object.__setattr__(self, "transform", self.transform.upper())
        if self.depth is not None and int(self.depth) < 1:
            raise ConfigError("depth must be >= 1")

    def resolved_depth(self, T: int) -> int:
        d = int(self.depth) if self.depth is not None else default_depth(T, DEFAULT_BETA)
        if d > dyadic_level(T):
            raise DepthExceeded(f"trend depth {d} exceeds log2 T = {dyadic_level(T)}")
        return d

    def to_dict(self) -> dict:
        return {"trend_filter": self.trend_filter.name, "depth": self.depth,
                "rule": self.rule, "transform": self.transform}

    @classmethod
    def from_dict(cls, d: dict) -> "TrendConfig":
        extra = set(d) - {"trend_filter", "depth", "rule", "transform"}
        if extra:
            raise ConfigError(f"unknown trend settings: {sorted(extra)}")
        return cls(**d)


@dataclass(frozen=True, eq=False)
class TrendEstimate:
    mu_hat: np.ndarray = field(repr=False)
    variances: np.ndarray = field(repr=False)
    negatives_repaired: int
    config: TrendConfig
    survivors: int = 0

    @property
    def local_sd(self) -> np.ndarray:
        """Standard deviation of the finest-scale coefficients over time."""
        return np.sqrt(self.variances[0])

    def to_csv(self, path) -> None:
        """Columns ``time_index,value,local_sd``."""
        sd = self.local_sd
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time_index", "value", "local_sd"])
            for k, (v, s) in enumerate(zip(self.mu_hat, sd)):
                w.writerow([k, f"{v:.17g}", f"{s:.17g}"])


def repair_nonpositive(row) -> tuple[np.ndarray, int]:
    """Replace entries ``<= 0`` by the nearest positive entry in time.

    Ties between an earlier and a later neighbour at equal distance go to the
    earlier one.  Returns the repaired row and the number of replaced entries.
    """
    row = np.asarray(row, dtype=float)
    good = np.flatnonzero(row > 0)
    if good.size == 0:
        raise AllNegativeRow("no positive variance in a scale row")
    bad = np.flatnonzero(~(row > 0))
    if bad.size == 0:
        return row.copy(), 0
    pos = np.searchsorted(good, bad)
    left = good[np.clip(pos - 1, 0, good.size - 1)]
    right = good[np.clip(pos, 0, good.size - 1)]
    dl = np.where(pos > 0, bad - left, np.iinfo(np.int64).max)
    dr = np.where(pos < good.size, right - bad, np.iinfo(np.int64).max)
    out = row.copy()
    out[bad] = row[np.where(dl <= dr, left, right)]
    return out, int(bad.size)


def coefficient_variance(S, C: OperatorMatrix, depth: int | None = None) -> tuple[np.ndarray, int]:
    """``sigma2[r, s] = sum_l C[r, l] S[l, s]`` for the finest ``depth`` trend scales, repaired.

    ``S`` may be a :class:`SpectrumEstimate` or a plain array.
    """
    S = S.S_hat if isinstance(S, SpectrumEstimate) else np.asarray(S, dtype=float)
    rows = C.shape[0] if depth is None else int(depth)
    if rows > C.shape[0] or C.shape[1] != S.shape[0]:
        raise ShapeMismatch(f"operator {C.shape} does not fit {rows} scales x spectrum {S.shape}")
    raw = C.entries[:rows] @ S
    out = np.empty_like(raw)
    count = 0
    for r in range(rows):
        out[r], n = repair_nonpositive(raw[r])
        count += n
    return out, count


def _shrink(d, lam, rule):
    if rule == "hard":
        return np.where(np.abs(d) > lam, d, 0.0)
    return np.sign(d) * np.maximum(np.abs(d) - lam, 0.0)


def threshold_and_invert(x, sigma, cfg: TrendConfig, depth: int) -> tuple[np.ndarray, int]:
    """Threshold the finest ``depth`` scales at ``sigma * sqrt(2 ln T)`` and invert."""
    x = np.asarray(x, dtype=float)
    T = x.size
    factor = math.sqrt(2.0 * math.log(T))
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (depth, T))
    filt = cfg.trend_filter
    if cfg.transform == "TI":
        c = ndwt(x, filt, depth)
        kept = _shrink(c.coeffs, sigma * factor, cfg.rule)
        return ti_reconstruct(c.replace(coeffs=kept)), int(np.count_nonzero(kept))
    details, approx = dwt(x, filt, depth)
    out, n = [], 0
    for i, d in enumerate(details):
        lam = sigma[i][dwt_time_index(filt, i + 1, T)] * factor
        k = _shrink(d, lam, cfg.rule)
        n += int(np.count_nonzero(k))
        out.append(k)
    return idwt(out, approx, filt), n


def trend_cross_operator(trend_filter: WaveletFilter, spectrum_filter: WaveletFilter,
                         depth: int, spectrum_depth: int) -> OperatorMatrix:
    return operators.cross_matrix(autocorr_for(trend_filter, depth),
                                  autocorr_for(spectrum_filter, spectrum_depth),
                                  depth, spectrum_depth)


def estimate_trend(x, S: SpectrumEstimate, cfg: TrendConfig | None = None) -> TrendEstimate:
    """Trend estimate using coefficient variances from a spectrum estimate of ``x``."""
    cfg = TrendConfig() if cfg is None else cfg
    x = np.asarray(x, dtype=float)
    T = x.size
    if S.length != T:
        raise ShapeMismatch(f"series has length {T} but spectrum covers {S.length} times")
    depth = cfg.resolved_depth(T)
    C = trend_cross_operator(cfg.trend_filter, S.config.analysis_filter, depth, S.depth)
    var, repaired = coefficient_variance(S, C, depth)
    mu, n = threshold_and_invert(x, np.sqrt(var), cfg, depth)
    return TrendEstimate(mu, var, repaired, cfg, n)


def estimate_trend_global_baseline(x, cfg: TrendConfig | None = None) -> TrendEstimate:
    """Stationary comparator: one MAD-based ``sigma_r`` per scale, constant in time."""
    cfg = TrendConfig() if cfg is None else cfg
    x = np.asarray(x, dtype=float)
    T = x.size
    depth = cfg.resolved_depth(T)
    c = ndwt(x, cfg.trend_filter, depth)
    sig = np.array([mad_sigma(row) for row in c.coeffs])
    var = np.repeat((sig ** 2)[:, None], T, axis=1)
    mu, n = threshold_and_invert(x, sig[:, None], cfg, depth)
    return TrendEstimate(mu, var, 0, cfg, n)
