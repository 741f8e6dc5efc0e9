"""Randomised property checks over filters, depths and inputs."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tlsw.operators import diff_correction_matrix, invert
from tlsw.simulation import SimConfig, simulate_lsw
from tlsw.spectral import smooth_running_mean
from tlsw.transforms import Periodogram, difference, ndwt, seasonal_difference, ti_reconstruct
from tlsw.trend import repair_nonpositive
from tlsw.wavelets import autocorr_for, parse_filter

FILTERS = st.sampled_from(["haar", "EP2", "EP5", "EP10", "LA4", "LA7", "LA10"])
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(name=FILTERS, logT=st.integers(3, 8), data=st.data())
def test_round_trip(name, logT, data):
    T = 2 ** logT
    x = data.draw(arrays(float, T, elements=finite))
    depth = data.draw(st.integers(1, logT))
    c = ndwt(x, parse_filter(name), depth)
    assert np.max(np.abs(ti_reconstruct(c) - x)) <= 1e-10 * max(1.0, np.max(np.abs(x)))


@settings(max_examples=30, deadline=None)
@given(name=FILTERS, order=st.integers(1, 2), depth=st.integers(1, 7),
       S=arrays(float, 7, elements=st.floats(0, 10)))
def test_correction_identity(name, order, depth, S):
    D = diff_correction_matrix(autocorr_for(parse_filter(name), depth), depth, order)
    S = S[:depth]
    back = invert(D).entries @ (D.entries @ S)
    assert np.allclose(back, S, rtol=0, atol=1e-8 * max(1.0, S.max()))


@settings(max_examples=50, deadline=None)
@given(c=finite, n=st.integers(1, 4), T=st.integers(6, 40))
def test_difference_of_constant(c, n, T):
    assert np.all(difference(np.full(T, c), n) == 0)


@settings(max_examples=50, deadline=None)
@given(pattern=arrays(float, st.integers(1, 13), elements=finite), reps=st.integers(2, 6))
def test_seasonal_difference_of_pattern(pattern, reps):
    x = np.tile(pattern, reps)
    assert np.all(seasonal_difference(x, pattern.size) == 0)


@settings(max_examples=50, deadline=None)
@given(row=arrays(float, st.integers(1, 50), elements=st.floats(-5, 5)))
def test_repair_properties(row):
    if not np.any(row > 0):
        return
    out, n = repair_nonpositive(row)
    assert np.all(out > 0)
    assert n == int(np.sum(row <= 0))
    assert set(out.tolist()) <= set(row[row > 0].tolist())


@settings(max_examples=30, deadline=None)
@given(v=arrays(float, (2, 32), elements=finite), W=st.integers(1, 20))
def test_running_mean_preserves_row_mean(v, W):
    out = smooth_running_mean(Periodogram(v), W).values
    np.testing.assert_allclose(out.mean(axis=1), v.mean(axis=1), atol=1e-9)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2 ** 64 - 1))
def test_simulation_deterministic(seed):
    cfg = SimConfig(T=64, spectrum="S3", trend="sine", seed=seed)
    assert simulate_lsw(cfg).tobytes() == simulate_lsw(cfg).tobytes()
