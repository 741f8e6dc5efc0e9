import numpy as np
import pytest

from tlsw.errors import AllNegativeRow, ConfigError, DepthExceeded, ShapeMismatch
from tlsw.operators import inner_product_matrix
from tlsw.simulation import SimConfig, realisation_rng, simulate_components
from tlsw.spectral import SpectralConfig, SpectrumEstimate, estimate_ews
from tlsw.transforms import ndwt
from tlsw.trend import (TrendConfig, coefficient_variance, estimate_trend,
                        estimate_trend_global_baseline, repair_nonpositive, threshold_and_invert,
                        trend_cross_operator)
from tlsw.wavelets import autocorr_for, parse_filter


def fixed_spectrum(S, filt="haar"):
    S = np.asarray(S, dtype=float)
    cfg = SpectralConfig(analysis_filter=filt, depth=S.shape[0])
    M = inner_product_matrix(autocorr_for(cfg.analysis_filter, S.shape[0]), S.shape[0])
    return SpectrumEstimate(S, cfg, M, tuple(int(c) for c in (S < 0).sum(1)), M.condition_number())


class TestRepair:
    def test_nearest_positive(self):
        out, n = repair_nonpositive([-1.0, 2.0, 3.0])
        np.testing.assert_array_equal(out, [2, 2, 3])
        assert n == 1

    def test_tie_goes_to_earlier(self):
        out, n = repair_nonpositive([1.0, 0.0, 5.0, -2.0, -1.0, 7.0])
        np.testing.assert_array_equal(out, [1, 1, 5, 5, 7, 7])
        assert n == 3

    def test_no_change(self):
        out, n = repair_nonpositive([1.0, 2.0])
        assert n == 0 and list(out) == [1, 2]

    def test_all_negative(self):
        with pytest.raises(AllNegativeRow):
            repair_nonpositive([-1.0, 0.0])


class TestCoefficientVariance:
    def test_white_noise_haar(self, rng):
        J = 10
        acw = autocorr_for(parse_filter("haar"), J)
        C = trend_cross_operator(parse_filter("haar"), parse_filter("haar"), J, J)
        S = np.repeat((2.0 ** -np.arange(1, J + 1))[:, None], 8, axis=1)
        var, n = coefficient_variance(S, C)
        assert n == 0
        want = inner_product_matrix(acw, J).entries[0] @ S[:, 0]
        assert var[0, 0] == pytest.approx(want)
        d = np.array([ndwt(rng.standard_normal(64), parse_filter("haar"), 1).coeffs[0, 7]
                      for _ in range(1000)])
        assert d.var() == pytest.approx(var[0, 0], rel=0.1)
        assert want == pytest.approx(1.0, abs=0.01)

    def test_shape_checks(self):
        C = trend_cross_operator(parse_filter("LA4"), parse_filter("EP4"), 3, 4)
        assert C.shape == (3, 4)
        with pytest.raises(ShapeMismatch):
            coefficient_variance(np.ones((5, 8)), C)
        with pytest.raises(ShapeMismatch):
            coefficient_variance(np.ones((4, 8)), C, depth=4)


class TestEstimateTrend:
    def test_pure_trend_passes_through(self):
        T = 256
        z = np.arange(T) / T
        x = 3 * z ** 2 - z + 1
        S = fixed_spectrum(np.full((5, T), 1e-14))
        est = estimate_trend(x, S, TrendConfig(trend_filter="haar", depth=5))
        np.testing.assert_allclose(est.mu_hat, x, atol=1e-9)

    def test_noise_is_removed(self, rng):
        T = 512
        x = rng.standard_normal(T)
        S = fixed_spectrum(np.repeat((2.0 ** -np.arange(1, 7))[:, None], T, axis=1))
        est = estimate_trend(x, S, TrendConfig(trend_filter="haar", depth=6))
        assert np.var(est.mu_hat) < 0.1 * np.var(x)

    @pytest.mark.parametrize("transform,rule", [("TI", "hard"), ("TI", "soft"),
                                                ("DWT", "hard"), ("dwt", "soft")])
    def test_variants(self, transform, rule, rng):
        x = np.linspace(0, 4, 256) + 0.3 * rng.standard_normal(256)
        cfg = TrendConfig(depth=4, rule=rule, transform=transform)
        mu, kept = threshold_and_invert(x, 0.3, cfg, 4)
        assert mu.shape == x.shape and kept > 0
        assert np.mean((mu - np.linspace(0, 4, 256)) ** 2) < 0.09

    def test_zero_threshold_is_identity(self, rng):
        x = rng.standard_normal(128)
        for tr in ("TI", "DWT"):
            mu, _ = threshold_and_invert(x, 0.0, TrendConfig(depth=5, transform=tr), 5)
            assert np.max(np.abs(mu - x)) < 1e-10

    def test_local_variance_beats_global_threshold(self):
        cfg = SimConfig(T=1024, spectrum="S1", trend="linear")
        tcfg = TrendConfig(depth=6)
        scfg = SpectralConfig(depth=7, smoother="mean:64")
        ours, base = [], []
        for r in range(20):
            sim = simulate_components(cfg, realisation_rng(5, r))
            est = estimate_trend(sim.x, estimate_ews(sim.x, scfg), tcfg)
            ours.append(np.mean((est.mu_hat - sim.trend) ** 2))
            b = estimate_trend_global_baseline(sim.x, tcfg)
            base.append(np.mean((b.mu_hat - sim.trend) ** 2))
        assert np.mean(ours) < np.mean(base)

    def test_errors(self, rng):
        S = fixed_spectrum(np.ones((4, 64)))
        with pytest.raises(ShapeMismatch):
            estimate_trend(np.zeros(128), S)
        with pytest.raises(DepthExceeded):
            estimate_trend(np.zeros(64), S, TrendConfig(depth=7))
        with pytest.raises(ConfigError):
            TrendConfig(rule="firm")
        with pytest.raises(ConfigError):
            TrendConfig(transform="packet")
        with pytest.raises(ConfigError):
            TrendConfig.from_dict({"lambda": 1})

    def test_csv(self, tmp_path, rng):
        x = rng.standard_normal(128)
        S = fixed_spectrum(np.ones((4, 128)))
        est = estimate_trend(x, S, TrendConfig(depth=3))
        est.to_csv(tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "time_index,value,local_sd" and len(lines) == 129
        np.testing.assert_allclose(est.local_sd, np.sqrt(est.variances[0]))
