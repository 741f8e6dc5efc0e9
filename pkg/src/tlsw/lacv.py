"""Local autocovariance ``c(z, tau) = sum_j S_j(z) Psi_j(tau)`` and derived quantities."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DepthExceeded
from .spectral import SpectrumEstimate
from .wavelets import AutocorrWaveletSet, autocorr_for

ACF_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class LACVEstimate:
    """``c_hat[k, tau]`` for times ``k = 0..T-1`` and lags ``tau = 0..max_lag``."""

    c_hat: np.ndarray = field(repr=False)
    J0: int
    source: SpectrumEstimate | None = field(default=None, repr=False)

    @property
    def max_lag(self) -> int:
        return self.c_hat.shape[1] - 1

    @property
    def negative_variance_count(self) -> int:
        return int(np.count_nonzero(self.c_hat[:, 0] < 0))

    def to_csv(self, path) -> None:
        """Long format with columns ``time_index,lag,value``."""
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time_index", "lag", "value"])
            for k, row in enumerate(self.c_hat):
                for tau, v in enumerate(row):
                    w.writerow([k, tau, f"{v:.17g}"])


def default_max_lag(J0: int) -> int:
    return 2 ** max(J0 - 3, 0)


def lacv(S, acw: AutocorrWaveletSet | None = None, J0: int | None = None,
         max_lag: int | None = None) -> LACVEstimate:
    """``c_hat(k/T, tau) = sum_{j=-J0}^{-1} S_j(k/T) Psi_j(tau)``.

    ``S`` is a :class:`SpectrumEstimate` (its analysis wavelet is used when
    ``acw`` is omitted) or a plain ``scales x time`` array together with ``acw``.
    """
    src = S if isinstance(S, SpectrumEstimate) else None
    arr = S.S_hat if src is not None else np.asarray(S, dtype=float)
    J0 = arr.shape[0] if J0 is None else int(J0)
    if not 1 <= J0 <= arr.shape[0]:
        raise DepthExceeded(f"J0={J0} but the spectrum has {arr.shape[0]} scales")
    if acw is None:
        if src is None:
            raise ValueError("autocorrelation wavelets are required for a plain array")
        acw = autocorr_for(src.config.analysis_filter, J0)
    max_lag = default_max_lag(J0) if max_lag is None else int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    psi = acw.matrix(J0, np.arange(max_lag + 1))  # (J0, lags)
    return LACVEstimate(arr[:J0].T @ psi, J0, src)


def local_variance(L: LACVEstimate) -> np.ndarray:
    return L.c_hat[:, 0].copy()


def local_acf(L: LACVEstimate, floor: float | None = None) -> np.ndarray:
    """``rho(z, tau) = c(z, tau) / max(c(z, 0), floor)``.

    The default floor is ``1e-8`` times the largest local variance (or
    ``1e-8`` if that is not positive).
    """
    v = L.c_hat[:, 0]
    if floor is None:
        vmax = float(v.max()) if v.size else 0.0
        floor = ACF_FLOOR * vmax if vmax > 0 else ACF_FLOOR
    if floor <= 0:
        raise ValueError("floor must be positive")
    return L.c_hat / np.maximum(v, floor)[:, None]
