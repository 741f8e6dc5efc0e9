"""Inner-product operator matrices over scales and their guarded inversion.

All matrices are indexed by scale pairs ``(j, l)`` with row/column 0 holding
scale ``-1``.  The (positive-index) closed forms quoted in docstrings for the
Haar wavelet use ``j_pos = -j``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .errors import DepthExceeded, KindMismatch, ShapeMismatch, SingularMatrix, UnsupportedOrder
from .wavelets import AutocorrWaveletSet

COND_LIMIT = 1e12
MAX_DIFF_ORDER = 5


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A matrix over scales with a tag describing how it was built.

    ``kind`` is one of ``"A"``, ``"A_lagged"``, ``"D_diff"``, ``"D_seasonal"``,
    ``"C_cross"``, ``"P_rescaled"`` or ``"inverse"``; ``param`` carries the lag,
    difference order or period where relevant.
    """

    kind: str
    entries: np.ndarray = field(repr=False)
    param: int | None = None
    filters: tuple = ()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.entries))

    def __matmul__(self, other):
        return self.entries @ np.asarray(other)

    def to_csv(self, path) -> None:
        """Write rows for scales -1, -2, ... as plain decimals (17 significant digits)."""
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scale"] + [str(-(c + 1)) for c in range(self.entries.shape[1])])
            for r, row in enumerate(self.entries):
                w.writerow([str(-(r + 1))] + [f"{v:.17g}" for v in row])


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_depth(acw: AutocorrWaveletSet, depth: int) -> None:
    if depth < 1 or depth > acw.max_depth:
        raise DepthExceeded(f"requested {depth} scales but only {acw.max_depth} available")


def _lagged_products(acw_row: AutocorrWaveletSet, acw_col: AutocorrWaveletSet,
                     rows: int, cols: int, lag: int) -> np.ndarray:
    """``M[j, l] = sum_tau Psi^row_j(tau) Psi^col_l(tau - lag)`` by overlap slicing."""
    out = np.empty((rows, cols))
    for a in range(rows):
        pa = acw_row.values[a]
        ma = pa.size // 2
        for b in range(cols):
            pb = acw_col.values[b]
            mb = pb.size // 2
            # tau ranges where both factors are supported
            lo = max(-ma, lag - mb)
            hi = min(ma, lag + mb)
            if lo > hi:
                out[a, b] = 0.0
                continue
            out[a, b] = np.dot(pa[lo + ma:hi + ma + 1], pb[lo - lag + mb:hi - lag + mb + 1])
    return out


def inner_product_matrix(acw: AutocorrWaveletSet, depth: int, lag: int = 0) -> OperatorMatrix:
    """``A^lag_{jl} = sum_tau Psi_j(tau) Psi_l(tau - lag)``; ``lag=0`` gives ``A_J``.

    For Haar (positive indices, ``l > j``) ``A_jj = 2**j/3 + 5*2**-j/3`` and
    ``A_jl = 2**(2j-l-1) + 2**-l``.
    """
    _check_depth(acw, depth)
    if lag < 0:
        raise ValueError("lag must be non-negative")
    m = _lagged_products(acw, acw, depth, depth, int(lag))
    kind = "A" if lag == 0 else "A_lagged"
    return OperatorMatrix(kind, _frozen(m), int(lag), (acw.filter,))


def diff_correction_matrix(acw: AutocorrWaveletSet, depth: int, order: int = 1) -> OperatorMatrix:
    """Bias operator of the ``order``-times differenced periodogram.

    ``D^n = C(2n, n) A + 2 sum_{tau=1}^{n} (-1)**tau C(2n, n+tau) A^tau``.
    """
    if not 1 <= order <= MAX_DIFF_ORDER:
        raise UnsupportedOrder(f"difference order must lie in 1..{MAX_DIFF_ORDER}")
    _check_depth(acw, depth)
    n = int(order)
    # exact integer weights, converted once
    m = comb(2 * n, n) * _lagged_products(acw, acw, depth, depth, 0)
    for tau in range(1, n + 1):
        w = 2 * (-1) ** tau * comb(2 * n, n + tau)
        m = m + w * _lagged_products(acw, acw, depth, depth, tau)
    return OperatorMatrix("D_diff", _frozen(m), n, (acw.filter,))


def seasonal_correction_matrix(acw: AutocorrWaveletSet, depth: int, period: int) -> OperatorMatrix:
    """``D^L_{jl} = 2 sum_tau Psi_j(tau) (Psi_l(tau) - Psi_l(tau - L))``."""
    if period < 1:
        raise ValueError("period must be >= 1")
    _check_depth(acw, depth)
    a0 = _lagged_products(acw, acw, depth, depth, 0)
    aL = _lagged_products(acw, acw, depth, depth, int(period))
    m = 2.0 * a0 - 2.0 * aL
    # symmetrise away rounding so downstream symmetry checks are exact
    m = 0.5 * (m + m.T)
    out = OperatorMatrix("D_seasonal", _frozen(m), int(period), (acw.filter,))
    _guard(out)
    return out


def cross_matrix(acw_row: AutocorrWaveletSet, acw_col: AutocorrWaveletSet,
                 rows: int, cols: int | None = None) -> OperatorMatrix:
    """``C[j, l] = sum_tau Psi^row_j(tau) Psi^col_l(tau)``.

    For coefficient variances, rows belong to the wavelet the coefficients are
    taken with and columns to the wavelet generating the spectrum, so that
    ``Var(d_{r,s}) ~ sum_l C[r, l] S_l(s/T)``.  The matrix may be rectangular.
    """
    cols = rows if cols is None else cols
    _check_depth(acw_row, rows)
    _check_depth(acw_col, cols)
    m = _lagged_products(acw_row, acw_col, rows, cols, 0)
    return OperatorMatrix("C_cross", _frozen(m), None, (acw_row.filter, acw_col.filter))


def rescale_P(d1: OperatorMatrix) -> OperatorMatrix:
    """``P_{jl} = 2**(|j|/2) D1_{jl} 2**(|l|/2)``.

    For Haar ``P_jj = 10`` and ``P_{j,j+m} = 6 * 2**(-m/2)``.
    """
    if d1.kind != "D_diff" or d1.param != 1:
        raise KindMismatch("rescale_P expects a first-difference correction matrix")
    s = 2.0 ** (np.arange(1, d1.dim + 1) / 2.0)
    return OperatorMatrix("P_rescaled", _frozen(s[:, None] * d1.entries * s[None, :]), None, d1.filters)


def _guard(m: OperatorMatrix) -> float:
    e = m.entries
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {e.shape}")
    if not np.all(np.isfinite(e)):
        raise SingularMatrix("matrix has non-finite entries")
    cond = float(np.linalg.cond(e))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrix(
            f"{m.kind} matrix has condition number {cond:.3g} > {COND_LIMIT:.0e}; "
            "reduce the number of scales")
    return cond


def invert(m: OperatorMatrix) -> OperatorMatrix:
    """Dense inverse behind a condition-number guard."""
    _guard(m)
    inv = np.linalg.solve(m.entries, np.eye(m.dim))
    return OperatorMatrix("inverse", _frozen(inv), m.param, m.filters)
