"""Daubechies filters, discrete non-decimated wavelets and autocorrelation wavelets.

Scales are indexed with negative integers throughout: ``j = -1`` is the finest
scale, ``j = -2`` the next coarser one and so on.  Arrays holding one row per
scale store scale ``-1`` in row 0.
"""
from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field

import numpy as np

from . import _filter_tables
from .errors import DepthExceeded, UnsupportedFilter

MAX_DEPTH = 20


class Family(str, enum.Enum):
    HAAR = "haar"
    EXTREMAL_PHASE = "extremal_phase"
    LEAST_ASYMMETRIC = "least_asymmetric"


_SHORT = {Family.HAAR: "haar", Family.EXTREMAL_PHASE: "EP", Family.LEAST_ASYMMETRIC: "LA"}


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveletFilter:
    """Orthonormal quadrature-mirror filter pair.

    ``low_pass`` holds ``h_0 .. h_{N_h-1}``.  The high pass filter is
    ``g_k = (-1)**k h_{1-k}``, supported on ``k = 2-N_h .. 1``; ``high_pass``
    stores it from its first index, :attr:`high_pass_origin`.
    """

    family: Family
    vanishing_moments: int
    low_pass: np.ndarray = field(repr=False)
    high_pass: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return self.low_pass.size

    @property
    def high_pass_origin(self) -> int:
        return 2 - self.length

    @property
    def name(self) -> str:
        if self.family is Family.HAAR:
            return "haar"
        return f"{_SHORT[self.family]}{self.vanishing_moments}"

    def _key(self):
        # Haar and EP1 share coefficients and are interchangeable downstream
        fam = Family.EXTREMAL_PHASE if self.family is Family.HAAR else self.family
        return fam, self.vanishing_moments

    def __eq__(self, other):
        if not isinstance(other, WaveletFilter):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def _coerce_family(family) -> Family:
    if isinstance(family, Family):
        return family
    key = str(family).strip().lower().replace("-", "_").replace(" ", "_")
    aliases = {
        "haar": Family.HAAR,
        "ep": Family.EXTREMAL_PHASE,
        "daubexphase": Family.EXTREMAL_PHASE,
        "daub_extremal_phase": Family.EXTREMAL_PHASE,
        "daubextremalphase": Family.EXTREMAL_PHASE,
        "extremal_phase": Family.EXTREMAL_PHASE,
        "la": Family.LEAST_ASYMMETRIC,
        "daubleasymm": Family.LEAST_ASYMMETRIC,
        "daub_least_asymmetric": Family.LEAST_ASYMMETRIC,
        "daubleastasymmetric": Family.LEAST_ASYMMETRIC,
        "least_asymmetric": Family.LEAST_ASYMMETRIC,
    }
    try:
        return aliases[key]
    except KeyError:
        raise UnsupportedFilter(f"unknown wavelet family {family!r}") from None


def make_filter(family, vanishing_moments: int = 1) -> WaveletFilter:
    """Return the Daubechies filter pair for ``family`` and ``vanishing_moments``.

    Supported: Haar with 1 moment; extremal phase and least asymmetric with
    1 to 10 moments.
    """
    fam = _coerce_family(family)
    n = int(vanishing_moments)
    if fam is Family.HAAR:
        if n != 1:
            raise UnsupportedFilter("Haar has exactly one vanishing moment")
        table = _filter_tables.EXTREMAL_PHASE
    elif fam is Family.EXTREMAL_PHASE:
        table = _filter_tables.EXTREMAL_PHASE
    else:
        table = _filter_tables.LEAST_ASYMMETRIC
    if n not in table:
        raise UnsupportedFilter(f"{fam.value} with {n} vanishing moments is not supported")
    h = np.array(table[n], dtype=float)
    g = h[::-1] * (-1.0) ** np.arange(h.size)
    return WaveletFilter(fam, n, _frozen(h), _frozen(g))


_NAME_RE = re.compile(r"^\s*(haar|ep|la|d|s)\s*(\d*)\s*$", re.IGNORECASE)


def parse_filter(spec) -> WaveletFilter:
    """Parse short names such as ``"haar"``, ``"EP4"`` or ``"LA10"``."""
    if isinstance(spec, WaveletFilter):
        return spec
    m = _NAME_RE.match(str(spec))
    if not m:
        raise UnsupportedFilter(f"cannot parse wavelet name {spec!r}")
    kind, num = m.group(1).lower(), m.group(2)
    if kind == "haar":
        if num not in ("", "1"):
            raise UnsupportedFilter("Haar has exactly one vanishing moment")
        return make_filter(Family.HAAR, 1)
    if not num:
        raise UnsupportedFilter(f"missing vanishing-moment count in {spec!r}")
    fam = Family.EXTREMAL_PHASE if kind in ("ep", "d") else Family.LEAST_ASYMMETRIC
    return make_filter(fam, int(num))


def support_length(filt: WaveletFilter, j: int) -> int:
    """``L_j = (2**-j - 1)(N_h - 1) + 1`` for negative scale ``j``."""
    return (2 ** (-j) - 1) * (filt.length - 1) + 1


def wavelet_origin(filt: WaveletFilter, j: int) -> int:
    """First index ``n`` with ``psi_{j,n}`` in the support, ``(2-N_h) 2**(-j-1)``."""
    return filt.high_pass_origin * 2 ** (-j - 1)


@dataclass(frozen=True, eq=False)
class DiscreteWaveletSet:
    filter: WaveletFilter
    max_depth: int
    wavelets: tuple = field(repr=False)

    def __getitem__(self, j: int) -> np.ndarray:
        """Discrete wavelet vector for negative scale ``j``, starting at :meth:`origin`."""
        if not -self.max_depth <= j <= -1:
            raise DepthExceeded(f"scale {j} outside -1..-{self.max_depth}")
        return self.wavelets[-j - 1]

    def origin(self, j: int) -> int:
        """Index ``n`` of the first stored entry of ``psi_{j,n}``."""
        return wavelet_origin(self.filter, j)

    def indices(self, j: int) -> np.ndarray:
        return self.origin(j) + np.arange(self[j].size)


@functools.lru_cache(maxsize=None)
def _cascade(filt: WaveletFilter, depth: int) -> tuple:
    h, g = filt.low_pass, filt.high_pass
    out = [_frozen(g)]
    for _ in range(depth - 1):
        prev = out[-1]
        up = np.zeros(2 * prev.size - 1)
        up[::2] = prev
        out.append(_frozen(np.convolve(h, up)))
    return tuple(out)


def discrete_wavelets(filt: WaveletFilter, max_depth: int) -> DiscreteWaveletSet:
    """Build the non-decimated discrete wavelets ``psi_{-1} .. psi_{-max_depth}``.

    ``psi_{-1} = g`` and ``psi_{j-1,n} = sum_k h_{n-2k} psi_{j,k}``; the index
    of the first entry doubles with each coarser scale (see :func:`wavelet_origin`).
    """
    if not 1 <= max_depth <= MAX_DEPTH:
        raise DepthExceeded(f"max_depth must lie in 1..{MAX_DEPTH}, got {max_depth}")
    return DiscreteWaveletSet(filt, int(max_depth), _cascade(filt, int(max_depth)))


@dataclass(frozen=True, eq=False)
class AutocorrWaveletSet:
    """Autocorrelation wavelets ``Psi_j(tau)``.

    Row ``i`` of ``values`` holds scale ``-(i+1)`` at lags
    ``-(L_j-1) .. L_j-1`` (centre element is lag 0).
    """

    source: DiscreteWaveletSet
    values: tuple = field(repr=False)

    @property
    def filter(self) -> WaveletFilter:
        return self.source.filter

    @property
    def max_depth(self) -> int:
        return self.source.max_depth

    def max_lag(self, j: int) -> int:
        return self.values[-j - 1].size // 2

    def __call__(self, j: int, tau) -> np.ndarray:
        """``Psi_j(tau)`` for integer lags, zero outside the support."""
        if not -self.max_depth <= j <= -1:
            raise DepthExceeded(f"scale {j} outside -1..-{self.max_depth}")
        row = self.values[-j - 1]
        m = row.size // 2
        tau = np.asarray(tau, dtype=int)
        out = np.zeros(tau.shape)
        inside = np.abs(tau) <= m
        out[inside] = row[tau[inside] + m]
        return out if out.ndim else float(out)

    def matrix(self, depth: int, lags) -> np.ndarray:
        """Array ``[j, tau]`` of ``Psi_{-(j+1)}(lags[tau])`` for the finest ``depth`` scales."""
        if depth > self.max_depth:
            raise DepthExceeded(f"depth {depth} exceeds {self.max_depth}")
        lags = np.asarray(lags, dtype=int)
        return np.vstack([np.atleast_1d(self(-(i + 1), lags)) for i in range(depth)])


@functools.lru_cache(maxsize=None)
def _autocorr(filt: WaveletFilter, depth: int) -> tuple:
    return tuple(_frozen(np.correlate(w, w, mode="full")) for w in _cascade(filt, depth))


def autocorrelation_wavelets(dws: DiscreteWaveletSet) -> AutocorrWaveletSet:
    """``Psi_j(tau) = sum_k psi_{j,k} psi_{j,k-tau}`` by exact finite correlation."""
    return AutocorrWaveletSet(dws, _autocorr(dws.filter, dws.max_depth))


def autocorr_for(filt: WaveletFilter, depth: int) -> AutocorrWaveletSet:
    """Shortcut: autocorrelation wavelets of ``filt`` down to scale ``-depth``."""
    return autocorrelation_wavelets(discrete_wavelets(filt, depth))
