import json

import numpy as np
import pytest

from tlsw.errors import ConfigError, DepthExceeded, NonDyadicLength, UnknownPreset
from tlsw.simulation import (SeasonalSpec, SimConfig, builtin_spectrum, builtin_trend,
                             compile_expression, innovations, realisation_rng,
                             seasonal_component, simulate_components, simulate_lsw,
                             simulate_noise, spectrum_from_config)
from tlsw.wavelets import autocorr_for, discrete_wavelets, parse_filter


def naive_simulate(S, filt, rng):
    """Triple loop over time, scale and location; innovations drawn scale-major."""
    J, T = S.shape
    xi = rng.standard_normal(J * T).reshape(J, T)
    dws = discrete_wavelets(filt, J)
    x = np.zeros(T)
    for t in range(T):
        for r in range(J):
            j = -(r + 1)
            psi = dict(zip(dws.indices(j) % T, dws[j]))
            for k in range(T):
                x[t] += np.sqrt(S[r, k]) * psi.get((k - t) % T, 0.0) * xi[r, k]
    return x


class TestProcess:
    @pytest.mark.parametrize("name", ["haar", "EP4"])
    def test_matches_naive_triple_loop(self, name):
        T = 64
        z = np.arange(T) / T
        S = np.vstack([1 + z, 0.5 * np.sin(np.pi * z) ** 2])
        f = parse_filter(name)
        fast = simulate_noise(S, f, "gaussian", np.random.default_rng(9))
        slow = naive_simulate(S, f, np.random.default_rng(9))
        np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12)

    def test_white_noise_variance(self):
        x = simulate_lsw(SimConfig(T=4096, generator="haar", spectrum="white_noise_haar", seed=1))
        assert np.var(x) == pytest.approx(1.0, abs=0.05)

    def test_haar_ma1_autocorrelation(self):
        x = simulate_lsw(SimConfig(T=4096, generator="haar", spectrum="haar_ma1", seed=2))
        r1 = np.corrcoef(x[1:], x[:-1])[0, 1]
        assert r1 == pytest.approx(-0.5, abs=0.05)

    def test_stationary_acv_matches_truth(self):
        # sample autocovariance vs sum_j S_j Psi_j(tau), 200 realisations
        S = {-1: 0.6, -2: 0.3, -3: 0.4}
        spec = spectrum_from_config({"scales": {str(j): str(v) for j, v in S.items()}})
        cfg = SimConfig(T=512, generator="EP4", spectrum=spec)
        acw = autocorr_for(parse_filter("EP4"), 3)
        lags = np.arange(4)
        truth = sum(v * acw(j, lags) for j, v in S.items())
        est = []
        for r in range(200):
            x = simulate_lsw(cfg, realisation_rng(8, r))
            est.append([np.mean(x * np.roll(x, tau)) for tau in lags])
        est = np.array(est)
        se = est.std(axis=0, ddof=1) / np.sqrt(len(est))
        assert np.all(np.abs(est.mean(axis=0) - truth) <= 3 * se)

    def test_components_add_up(self):
        cfg = SimConfig.from_dict({"T": 256, "spectrum": "S3", "trend": "sine",
                                   "seasonal": {"period": 12}, "seed": 4})
        sim = simulate_components(cfg)
        np.testing.assert_allclose(sim.x, sim.trend + sim.seasonal + sim.noise)
        assert sim.spectrum.shape == (3, 256)

    def test_depth_check(self):
        with pytest.raises(DepthExceeded):
            simulate_noise(np.ones((5, 16)), parse_filter("haar"), "gaussian",
                           np.random.default_rng(0))
        assert np.all(simulate_noise(np.zeros((0, 16)), parse_filter("haar"), "gaussian",
                                     np.random.default_rng(0)) == 0)


class TestInnovations:
    def test_moments(self):
        rng = np.random.default_rng(0)
        assert abs(innovations("exponential", 10 ** 6, rng).mean()) < 0.005
        assert innovations("gaussian", 10 ** 6, rng).var() == pytest.approx(1.0, abs=0.01)
        assert innovations("exponential", 10 ** 6, rng).var() == pytest.approx(1.0, abs=0.01)
        with pytest.raises(ConfigError):
            innovations("cauchy", 3, rng)


class TestPresets:
    def test_spectra(self):
        S1 = builtin_spectrum("S1").evaluate(1024)
        assert S1.shape == (5, 1024)
        assert S1[4, 128] == pytest.approx(1.0)
        assert S1[0, 799] == 0 and S1[0, 800] == 1 and S1[0, 900] == 0
        S2 = builtin_spectrum("s2").evaluate(1024)
        np.testing.assert_array_equal(S2.sum(axis=0), 1.0)
        assert builtin_spectrum("white_noise_haar").evaluate(64).shape == (6, 64)
        with pytest.raises(UnknownPreset):
            builtin_spectrum("S9")

    def test_trends(self):
        assert builtin_trend("sine")(0.0) == pytest.approx(-1.5)
        assert builtin_trend("linear")(0.5) == pytest.approx(2.0)
        assert builtin_trend("logistic")(0.0) == 0.0
        assert builtin_trend("logistic")(1.0) == pytest.approx(4 / (1 + np.exp(4 - 7 * np.log(4))))
        q = builtin_trend("pquad")
        c = 300 / 1024
        assert abs(q(c - 1e-12) - q(c)) < 0.01
        with pytest.raises(UnknownPreset):
            builtin_trend("cubic")

    def test_custom_expressions(self):
        f = compile_expression("where(z < 0.5, sin(pi * z) ** 2, 1 - z)")
        np.testing.assert_allclose(f(np.array([0.25, 0.75])), [0.5, 0.25])
        for bad in ("__import__('os')", "z.real", "open('x')", "z if z else 1", "(("):
            with pytest.raises(ConfigError):
                compile_expression(bad)
        with pytest.raises(ConfigError):
            spectrum_from_config({"scales": {"1": "z"}})
        with pytest.raises(ConfigError):
            spectrum_from_config({"scales": {"-1": "z - 1"}}).evaluate(8)


class TestSeasonal:
    def test_stationary(self):
        s = seasonal_component(SeasonalSpec(12), 120, np.random.default_rng(0))
        np.testing.assert_array_equal(s[12:], s[:-12])
        assert np.all((s >= 0) & (s <= 10))

    def test_time_varying(self):
        spec = SeasonalSpec(12, "time_varying")
        rng = np.random.default_rng(1)
        s = seasonal_component(spec, 96, rng)
        rng = np.random.default_rng(1)
        start = rng.uniform(0, 10, 12)
        slope = rng.uniform(-0.05, 0.05, 12)
        t = np.arange(96)
        np.testing.assert_allclose(s, start[(t - 1) % 12] + slope[(t - 1) % 12] * t)

    def test_validation(self):
        with pytest.raises(ConfigError):
            SeasonalSpec(0)
        with pytest.raises(ConfigError):
            SeasonalSpec(12, "cyclic")


class TestConfig:
    def test_json_round_trip(self):
        cfg = SimConfig.from_dict({"T": 512, "spectrum": "S2", "trend": "logistic",
                                   "innovations": "exponential", "seed": 42,
                                   "seasonal": {"period": 12, "mode": "time_varying"}})
        again = SimConfig.from_json(cfg.to_json())
        assert again.to_dict() == cfg.to_dict()
        np.testing.assert_array_equal(simulate_lsw(cfg), simulate_lsw(again))

    def test_reproducible(self):
        cfg = SimConfig(T=256, spectrum="S1", trend="linear", seed=7)
        assert simulate_lsw(cfg).tobytes() == simulate_lsw(cfg).tobytes()
        a = simulate_lsw(cfg, realisation_rng(7, 3))
        b = simulate_lsw(cfg, realisation_rng(7, 3))
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, simulate_lsw(cfg, realisation_rng(7, 4)))

    def test_generator_follows_preset(self):
        assert SimConfig.from_dict({"spectrum": "haar_ma1"}).generator.name == "haar"
        assert SimConfig.from_dict({"spectrum": "S1"}).generator.name == "EP4"

    @pytest.mark.parametrize("doc,err", [({"T": 1000}, NonDyadicLength),
                                         ({"colour": "red"}, ConfigError),
                                         ({"innovations": "t3"}, ConfigError),
                                         ({"seed": -1}, ConfigError),
                                         ({"T": "big"}, ConfigError),
                                         ({"seasonal": {"phase": 1}}, ConfigError),
                                         ({"spectrum": "S7"}, UnknownPreset)])
    def test_invalid(self, doc, err):
        with pytest.raises(err):
            SimConfig.from_dict(doc)

    def test_json_errors_have_position(self):
        with pytest.raises(ConfigError, match="line 2"):
            SimConfig.from_json('{"T": 64,\n "seed": }')
        with pytest.raises(ConfigError):
            SimConfig.from_json("[1, 2]")
