import json

import numpy as np
import pytest

from tlsw.errors import ConfigError, NonDyadicLength
from tlsw.io import RunManifest, dyadic_prefix, file_digest, read_series, write_series


class TestReadSeries:
    def test_single_column(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1.5\n-2\n3e-1\n")
        np.testing.assert_array_equal(read_series(p), [1.5, -2, 0.3])

    def test_single_column_with_header(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("ecg\n1\n2\n")
        np.testing.assert_array_equal(read_series(p), [1, 2])

    def test_time_value(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("time,value\n0,4\n1,5\n\n2,6\n")
        np.testing.assert_array_equal(read_series(p), [4, 5, 6])
        p.write_text("value,time\r\n4,0\r\n5,1\r\n")
        np.testing.assert_array_equal(read_series(p), [4, 5])

    def test_round_trip(self, tmp_path, rng):
        x = rng.standard_normal(16)
        write_series(tmp_path / "c.csv", x)
        assert read_series(tmp_path / "c.csv").tobytes() == x.tobytes()

    @pytest.mark.parametrize("text", ["", "a,b\n1,2\n", "1\nfoo\n", "1\nnan\n"])
    def test_bad(self, tmp_path, text):
        p = tmp_path / "d.csv"
        p.write_text(text)
        with pytest.raises(ConfigError):
            read_series(p)

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            read_series(tmp_path / "none.csv")


class TestDyadic:
    def test_prefix(self):
        x = np.arange(1000.0)
        with pytest.raises(NonDyadicLength):
            dyadic_prefix(x)
        y = dyadic_prefix(x, truncate=True)
        assert y.size == 512 and y[-1] == 511
        assert dyadic_prefix(np.arange(8.0)).size == 8


class TestManifest:
    def test_write(self, tmp_path):
        f = tmp_path / "x.csv"
        f.write_text("1\n")
        m = RunManifest("simulate", ["simulate"])
        m.add_input(f)
        m.add_output(f)
        m.seeds = {"seed": 3}
        path = m.write(tmp_path)
        doc = json.loads(path.read_text())
        assert doc["command"] == "simulate"
        assert doc["inputs"][str(f)] == file_digest(f)
        assert doc["outputs"]["x.csv"].startswith("sha256:")
        assert "total_seconds" in doc["timings"] and doc["version"]
