"""Evolutionary wavelet spectrum estimation from a (differenced) series.

Pipeline: detrend -> non-decimated transform -> raw periodogram -> smoothing
-> multiply each time slice by the inverse of the matching bias operator.
"""
from __future__ import annotations

import csv
import functools
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import operators
from .errors import ConfigError, ShapeMismatch
from .operators import OperatorMatrix
from .transforms import (Periodogram, difference, dyadic_level, inverse_rows,
                         ndwt, ndwt_rows, periodogram, seasonal_difference)
from .wavelets import WaveletFilter, autocorr_for, parse_filter

MAD_SCALE = 1.4826
DEFAULT_BETA = 0.7


def default_depth(T: int, beta: float = DEFAULT_BETA) -> int:
    """Rule-of-thumb number of scales ``floor(beta * log2 T)`` (at least 1)."""
    return max(1, int(math.floor(beta * math.log2(T) + 1e-12)))


_DETREND_RE = re.compile(r"^(none|diff(\d*)|seasonal:(\d+))$")
_SMOOTH_RE = re.compile(r"^(none|ti|mean(?::(\d+))?)$")


def parse_detrend(spec: str) -> tuple[str, int]:
    """``"none"`` -> ("none", 0); ``"diff2"`` -> ("diff", 2); ``"seasonal:12"`` -> ("seasonal", 12)."""
    m = _DETREND_RE.match(str(spec).strip().lower())
    if not m:
        raise ConfigError(f"detrend must be none, diff<n> or seasonal:<L>, got {spec!r}")
    if m.group(1) == "none":
        return "none", 0
    if m.group(3) is not None:
        L = int(m.group(3))
        if L < 1:
            raise ConfigError("seasonal period must be >= 1")
        return "seasonal", L
    n = int(m.group(2) or 1)
    if not 1 <= n <= operators.MAX_DIFF_ORDER:
        raise ConfigError(f"difference order must lie in 1..{operators.MAX_DIFF_ORDER}")
    return "diff", n


def parse_smoother(spec: str) -> tuple[str, int | None]:
    """``"mean:128"`` -> ("mean", 128); ``"mean"`` -> ("mean", None); ``"ti"``; ``"none"``."""
    m = _SMOOTH_RE.match(str(spec).strip().lower())
    if not m:
        raise ConfigError(f"smoother must be none, ti or mean[:W], got {spec!r}")
    name = m.group(1).split(":")[0]
    if name == "mean":
        W = None if m.group(2) is None else int(m.group(2))
        if W is not None and W < 1:
            raise ConfigError("running-mean half-width must be >= 1")
        return "mean", W
    return name, None


@dataclass(frozen=True)
class SpectralConfig:
    """Settings for :func:`estimate_ews`.

    ``depth=None`` resolves to ``floor(beta * log2 T)``; ``smoother="mean"``
    without a width resolves to ``W = T/8``.
    """

    analysis_filter: WaveletFilter = field(default_factory=lambda: parse_filter("EP4"))
    depth: int | None = None
    beta: float = DEFAULT_BETA
    detrend: str = "diff1"
    smoother: str = "mean"
    smoothing_filter: WaveletFilter = field(default_factory=lambda: parse_filter("haar"))

    def __post_init__(self):
        object.__setattr__(self, "analysis_filter", parse_filter(self.analysis_filter))
        object.__setattr__(self, "smoothing_filter", parse_filter(self.smoothing_filter))
        parse_detrend(self.detrend)
        parse_smoother(self.smoother)
        if self.depth is not None and int(self.depth) < 1:
            raise ConfigError("depth must be >= 1")
        if not 0 < self.beta <= 1:
            raise ConfigError("beta must lie in (0, 1]")

    def resolved_depth(self, T: int) -> int:
        return int(self.depth) if self.depth is not None else default_depth(T, self.beta)

    def resolved_width(self, T: int) -> int | None:
        kind, W = parse_smoother(self.smoother)
        if kind != "mean":
            return None
        return W if W is not None else max(1, T // 8)

    def to_dict(self) -> dict:
        return {
            "analysis_filter": self.analysis_filter.name,
            "depth": self.depth,
            "beta": self.beta,
            "detrend": self.detrend,
            "smoother": self.smoother,
            "smoothing_filter": self.smoothing_filter.name,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralConfig":
        known = {"analysis_filter", "depth", "beta", "detrend", "smoother", "smoothing_filter"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown spectral settings: {sorted(extra)}")
        return cls(**d)


# ---------------------------------------------------------------------------
# smoothing

def smooth_running_mean(p: Periodogram, W: int) -> Periodogram:
    """Centred circular moving average over ``2W+1`` bins, row by row.

    If the window covers the whole row every entry becomes the row mean.
    """
    if W < 1:
        raise ConfigError("running-mean half-width must be >= 1")
    v = np.asarray(p.values, dtype=float)
    T = v.shape[1]
    if 2 * W + 1 >= T:
        out = np.repeat(v.mean(axis=1, keepdims=True), T, axis=1)
    else:
        ext = np.concatenate([v[:, T - W:], v, v[:, :W]], axis=1)
        cs = np.concatenate([np.zeros((v.shape[0], 1)), np.cumsum(ext, axis=1)], axis=1)
        out = (cs[:, 2 * W + 1:] - cs[:, :T]) / (2 * W + 1)
    return Periodogram(out, p.source, True)


def mad_sigma(a) -> float:
    """Gaussian-consistent median absolute deviation."""
    a = np.asarray(a, dtype=float)
    return MAD_SCALE * float(np.median(np.abs(a - np.median(a))))


def smooth_ti_threshold(p: Periodogram, filt: WaveletFilter | None = None,
                        depth: int | None = None) -> Periodogram:
    """Translation-invariant hard thresholding of each periodogram row.

    The threshold for row ``j`` is ``sigma_j * ln T`` where ``sigma_j`` is the
    MAD of the finest-scale TI coefficients of that row.  The smooth remainder
    is kept.
    """
    filt = parse_filter("haar") if filt is None else filt
    v = np.asarray(p.values, dtype=float)
    T = v.shape[1]
    J = dyadic_level(T)
    depth = J if depth is None else depth
    det, smooth = ndwt_rows(v, filt, depth)
    sig = np.array([mad_sigma(det[0, r]) for r in range(v.shape[0])])
    lam = sig * math.log(T)
    keep = np.abs(det) > lam[None, :, None]
    out = inverse_rows(np.where(keep, det, 0.0), smooth, filt)
    return Periodogram(out, p.source, True)


# ---------------------------------------------------------------------------
# bias operators

@functools.lru_cache(maxsize=128)
def correction_operator(filt: WaveletFilter, depth: int, detrend: str) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Matching bias operator for a detrending choice and its guarded inverse."""
    kind, param = parse_detrend(detrend)
    acw = autocorr_for(filt, depth)
    if kind == "none":
        m = operators.inner_product_matrix(acw, depth)
    elif kind == "diff":
        m = operators.diff_correction_matrix(acw, depth, param)
    else:
        m = operators.seasonal_correction_matrix(acw, depth, param)
    return m, operators.invert(m)


def apply_detrend(x, detrend: str) -> np.ndarray:
    kind, param = parse_detrend(detrend)
    x = np.asarray(x, dtype=float)
    if kind == "none":
        return x
    if kind == "diff":
        return difference(x, param)
    return seasonal_difference(x, param)


def expected_periodogram(S, M: OperatorMatrix) -> np.ndarray:
    """``E I[j, k] = sum_l M[j, l] S[l, k]`` (leading order)."""
    S = np.asarray(S, dtype=float)
    if S.ndim == 1:
        S = S[:, None]
    if S.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"spectrum has {S.shape[0]} scales, operator expects {M.shape[1]}")
    return M.entries @ S


# ---------------------------------------------------------------------------
# estimate

@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    """``S_hat[j, k]`` for scales ``-1..-J1`` (row 0 is scale -1) and times ``k``."""

    S_hat: np.ndarray = field(repr=False)
    config: SpectralConfig
    correction_matrix: OperatorMatrix = field(repr=False)
    negative_counts: tuple = ()
    condition_number: float = float("nan")

    @property
    def depth(self) -> int:
        return self.S_hat.shape[0]

    @property
    def length(self) -> int:
        return self.S_hat.shape[1]

    def diagnostics(self) -> dict:
        return {
            "negative_counts": {str(-(i + 1)): int(c) for i, c in enumerate(self.negative_counts)},
            "condition_number": self.condition_number,
            "correction_kind": self.correction_matrix.kind,
            "depth": self.depth,
            "length": self.length,
        }

    def to_csv(self, path) -> None:
        """Long format with columns ``scale,j,time_index,value`` (scale = -j)."""
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scale", "j", "time_index", "value"])
            for r, row in enumerate(self.S_hat):
                for k, v in enumerate(row):
                    w.writerow([r + 1, -(r + 1), k, f"{v:.17g}"])

    def to_json(self, path) -> None:
        doc = {"config": self.config.to_dict(), "diagnostics": self.diagnostics()}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def smooth(p: Periodogram, cfg: SpectralConfig) -> Periodogram:
    kind, _ = parse_smoother(cfg.smoother)
    if kind == "none":
        return p
    if kind == "mean":
        return smooth_running_mean(p, cfg.resolved_width(p.length))
    return smooth_ti_threshold(p, cfg.smoothing_filter)


def estimate_ews(x, cfg: SpectralConfig | None = None) -> SpectrumEstimate:
    """Bias-corrected, smoothed spectrum estimate of a dyadic-length series."""
    cfg = SpectralConfig() if cfg is None else cfg
    x = np.asarray(x, dtype=float)
    T = x.size
    dyadic_level(T)
    J1 = cfg.resolved_depth(T)
    M, Minv = correction_operator(cfg.analysis_filter, J1, cfg.detrend)
    y = apply_detrend(x, cfg.detrend)
    kind, param = parse_detrend(cfg.detrend)
    source = "raw" if kind == "none" else f"{'differenced' if kind == 'diff' else 'seasonal'}({param})"
    p = smooth(periodogram(ndwt(y, cfg.analysis_filter, J1), source), cfg)
    S = Minv.entries @ p.values
    neg = tuple(int(c) for c in (S < 0).sum(axis=1))
    return SpectrumEstimate(S, cfg, M, neg, M.condition_number())


def with_overrides(cfg: SpectralConfig, **kw) -> SpectralConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
