import numpy as np
import pytest

from tlsw.wavelets import parse_filter

ALL_FILTERS = ["haar"] + [f"EP{n}" for n in range(2, 11)] + [f"LA{n}" for n in range(4, 11)]
SMALL_FILTERS = ["haar", "EP2", "EP4", "LA4", "LA8"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=SMALL_FILTERS)
def filt(request):
    return parse_filter(request.param)


@pytest.fixture
def haar():
    return parse_filter("haar")


def haar_psi(j, tau):
    """Closed-form Haar autocorrelation wavelet at negative scale ``j``."""
    u = np.abs(np.asarray(tau, dtype=float)) / 2.0 ** (-j)
    return np.where(u <= 0.5, 1 - 3 * u, np.where(u <= 1, u - 1, 0.0))


def naive_ndwt(x, filt, depth):
    """``d[j, k] = sum_n psi_{j,n} x[(k - n) mod T]`` straight from the wavelet vectors."""
    from tlsw.wavelets import discrete_wavelets
    x = np.asarray(x, dtype=float)
    T = x.size
    dws = discrete_wavelets(filt, depth)
    out = np.zeros((depth, T))
    for r in range(depth):
        j = -(r + 1)
        psi, idx = dws[j], dws.indices(j)
        for k in range(T):
            acc = 0.0
            for n, p in zip(idx, psi):
                acc += p * x[(k - n) % T]
            out[r, k] = acc
    return out
