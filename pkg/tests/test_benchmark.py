import json

import numpy as np
import pytest

from tlsw import benchmark
from tlsw.errors import ConfigError


class TestSuites:
    def test_worker_count(self, monkeypatch):
        monkeypatch.delenv("TLSW_THREADS", raising=False)
        assert benchmark.worker_count() == 1
        monkeypatch.setenv("TLSW_THREADS", "3")
        assert benchmark.worker_count() == 3
        for bad in ("0", "many"):
            monkeypatch.setenv("TLSW_THREADS", bad)
            with pytest.raises(ConfigError):
                benchmark.worker_count()

    def test_independent_of_worker_count(self):
        a = benchmark.run_suite("table2_gauss", 4, seed=9, T=512, workers=1)
        b = benchmark.run_suite("table2_gauss", 4, seed=9, T=512, workers=3)
        assert [c.as_dict() for c in a.cells] == [c.as_dict() for c in b.cells]

    def test_grid_and_single_realisation(self, tmp_path):
        rep = benchmark.run_suite("table3_exp", 1, seed=2, T=512)
        assert len(rep.cells) == 4 * 3 * 2  # trends x spectra x (ours, baseline)
        assert all(c.sd == 0.0 for c in rep.cells)
        rep.to_json(tmp_path / "r.json")
        rep.to_csv(tmp_path / "r.csv")
        doc = json.loads((tmp_path / "r.json").read_text())
        assert doc["realisations"] == 1 and "SeedSequence" in doc["seed_rule"]
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines[0].startswith("suite,row,spectrum,metric")
        assert len(lines) == 1 + len(rep.cells)
        assert "published" in rep.format_table()

    def test_reproducible_from_seed(self):
        a = benchmark.run_suite("table6_overdiff", 2, seed=5)
        b = benchmark.run_suite("table6_overdiff", 2, seed=5)
        assert [c.value for c in a.cells] == [c.value for c in b.cells]
        assert a.cell("Linear", "S1", "mse_ratio_diff2_diff1").reference == 1.562

    def test_unknown(self):
        with pytest.raises(ConfigError):
            benchmark.run_suite("table4", 1)
        with pytest.raises(ConfigError):
            benchmark.run_suite("table1", 0)
