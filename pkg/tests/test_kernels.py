import os
import subprocess
import sys

import numpy as np
import pytest

from tlsw import kernels


@pytest.fixture(scope="module")
def impls():
    return kernels.backends()


def naive_conv(x, f, step):
    T = x.shape[-1]
    out = np.zeros_like(x)
    for t in range(T):
        for p, c in enumerate(f):
            out[..., t] += c * x[..., (t - p * step) % T]
    return out


class TestKernels:
    @pytest.mark.parametrize("step", [1, 2, 8])
    def test_conv_against_loop(self, impls, step, rng):
        x = rng.standard_normal((3, 32))
        f = rng.standard_normal(5)
        for conv, _ in impls.values():
            np.testing.assert_allclose(conv(x, f, step), naive_conv(x, f, step), atol=1e-12)

    @pytest.mark.parametrize("step", [1, 4])
    def test_corr_is_adjoint(self, impls, step, rng):
        x, y = rng.standard_normal((2, 1, 32))
        f = rng.standard_normal(4)
        for conv, corr in impls.values():
            assert np.sum(conv(x, f, step) * y) == pytest.approx(np.sum(x * corr(y, f, step)))

    def test_backends_agree_bitwise(self, impls, rng):
        if "cython" not in impls:
            pytest.skip("compiled extension not built")
        x = rng.standard_normal((4, 256))
        f = np.ascontiguousarray(rng.standard_normal(8))
        for step in (1, 16, 128):
            for k in range(2):
                a = impls["python"][k](x, f, step)
                b = impls["cython"][k](x, f, step)
                assert a.tobytes() == b.tobytes()

    def test_read_only_inputs(self, impls):
        x = np.ones((1, 8))
        x.setflags(write=False)
        f = np.array([0.5, 0.5])
        f.setflags(write=False)
        for conv, corr in impls.values():
            np.testing.assert_allclose(conv(x, f, 1), 1.0)
            np.testing.assert_allclose(corr(x, f, 2), 1.0)

    def test_pure_python_switch(self):
        env = dict(os.environ, TLSW_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "import tlsw; print(tlsw.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"
