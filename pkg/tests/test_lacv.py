import numpy as np
import pytest

from tlsw.errors import DepthExceeded
from tlsw.lacv import default_max_lag, lacv, local_acf, local_variance
from tlsw.simulation import SimConfig, realisation_rng, simulate_lsw
from tlsw.spectral import SpectralConfig, estimate_ews
from tlsw.transforms import interior_mask
from tlsw.wavelets import autocorr_for, parse_filter


@pytest.fixture(scope="module")
def haar_acw():
    return autocorr_for(parse_filter("haar"), 8)


class TestTruth:
    def test_zero(self, haar_acw):
        L = lacv(np.zeros((3, 16)), haar_acw)
        assert L.c_hat.shape == (16, 2) and np.all(L.c_hat == 0)

    def test_haar_ma1(self, haar_acw):
        S = np.zeros((3, 32))
        S[0] = 1.0
        L = lacv(S, haar_acw, max_lag=3)
        np.testing.assert_allclose(L.c_hat, np.tile([1.0, -0.5, 0.0, 0.0], (32, 1)), atol=1e-12)
        np.testing.assert_allclose(local_acf(L)[:, 1], -0.5)

    def test_time_varying_variance(self, haar_acw):
        z = np.arange(64) / 64
        S = np.zeros((2, 64))
        S[0] = z
        np.testing.assert_allclose(local_variance(lacv(S, haar_acw)), z, atol=1e-12)

    def test_white_noise(self, haar_acw):
        S = np.repeat((2.0 ** -np.arange(1, 9))[:, None], 4, axis=1)
        L = lacv(S, haar_acw, max_lag=4)
        # truncated at 8 scales: the variance misses 2**-8
        np.testing.assert_allclose(L.c_hat[:, 0], 1 - 2.0 ** -8, atol=1e-12)

    def test_parameters(self, haar_acw):
        assert default_max_lag(7) == 16 and default_max_lag(2) == 1
        S = np.ones((4, 8))
        assert lacv(S, haar_acw).max_lag == 2
        assert lacv(S, haar_acw, J0=2).J0 == 2
        with pytest.raises(DepthExceeded):
            lacv(S, haar_acw, J0=5)
        with pytest.raises(ValueError):
            lacv(S, haar_acw, max_lag=-1)
        with pytest.raises(ValueError):
            lacv(S)

    def test_acf_floor(self, haar_acw):
        S = np.zeros((2, 4))
        S[0, :2] = 1.0
        S[0, 2:] = -1.0
        L = lacv(S, haar_acw)
        assert L.negative_variance_count == 2
        rho = local_acf(L)
        assert np.all(np.isfinite(rho))
        with pytest.raises(ValueError):
            local_acf(L, floor=0.0)

    def test_csv(self, haar_acw, tmp_path):
        lacv(np.ones((2, 4)), haar_acw, max_lag=1).to_csv(tmp_path / "l.csv")
        lines = (tmp_path / "l.csv").read_text().splitlines()
        assert lines[0] == "time_index,lag,value" and len(lines) == 1 + 4 * 2


class TestEstimated:
    def test_haar_ma1_from_data(self):
        cfg = SimConfig(T=1024, generator="haar", spectrum="haar_ma1")
        scfg = SpectralConfig(analysis_filter="haar", depth=7)
        mask = interior_mask(parse_filter("haar"), 7, 1024)
        c = np.mean([lacv(estimate_ews(simulate_lsw(cfg, realisation_rng(2, r)), scfg),
                          max_lag=2).c_hat for r in range(40)], axis=0)
        assert c[mask, 0].mean() == pytest.approx(1.0, abs=0.05)
        assert c[mask, 1].mean() == pytest.approx(-0.5, abs=0.05)
        assert abs(c[mask, 2].mean()) < 0.05

    def test_white_noise_acf_small(self):
        # Monte Carlo mean of the local autocorrelation at each interior time
        cfg = SimConfig(T=1024, generator="haar", spectrum="white_noise_haar")
        scfg = SpectralConfig(analysis_filter="haar", depth=7, smoother="mean:128")
        rho = np.mean([local_acf(lacv(estimate_ews(simulate_lsw(cfg, realisation_rng(4, r)), scfg),
                                      max_lag=3)) for r in range(50)], axis=0)
        mask = interior_mask(parse_filter("haar"), 7, 1024)
        assert np.all(np.abs(rho[mask, 1:]) <= 0.1)
