"""Monte Carlo suites for the simulation-study tables.

Every realisation ``r`` of a run seeded with ``seed`` draws from
``SeedSequence([seed, r])`` (see :func:`tlsw.simulation.realisation_rng`), so
all scenarios of a suite share noise realisations and any cell can be
recomputed from the seed alone.  Realisations are evaluated by a pool of
``TLSW_THREADS`` workers and reduced in realisation order, which keeps the
reported numbers independent of the worker count.
"""
from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .simulation import (SeasonalSpec, SimConfig, builtin_spectrum, builtin_trend,
                         realisation_rng, simulate_components)
from .spectral import SpectralConfig, estimate_ews
from .transforms import interior_mask
from .trend import TrendConfig, estimate_trend, estimate_trend_global_baseline
from .wavelets import parse_filter

T_DEFAULT = 1024
SPECTRA = ("S1", "S2", "S3")
TRENDS = (("Linear", "linear"), ("Sine", "sine"), ("Logistic", "logistic"),
          ("Piece. Quad.", "piecewise_quadratic"))

# Published reference values, used only for display in reports.
REFERENCE = {
    "table1": {"None": (3.13, 4.88, 1.87), "Linear": (3.32, 4.63, 2.76),
               "Sine": (3.32, 4.63, 2.76), "Logistic": (3.32, 4.63, 2.76),
               "Piece. Quad.": (3.32, 4.67, 2.79)},
    "table2_gauss": {"Linear": (0.024, 0.030, 0.028), "Sine": (0.022, 0.026, 0.022),
                     "Logistic": (0.023, 0.033, 0.027), "Piece. Quad.": (0.022, 0.032, 0.028)},
    "table3_exp": {"Linear": (0.030, 0.035, 0.040), "Sine": (0.027, 0.033, 0.037),
                   "Logistic": (0.030, 0.036, 0.044), "Piece. Quad.": (0.031, 0.038, 0.045)},
    "table5_seasonal": {"Seasonal + No Trend": (4.76, 8.44, 2.54),
                        "Seasonal + Linear": (4.76, 8.44, 2.54),
                        "Seasonal + Sine": (4.76, 8.43, 2.54),
                        "Seasonal + Logistic": (4.76, 8.44, 2.54),
                        "Seasonal + Piece. Quad.": (4.79, 8.46, 2.55),
                        "Time-Varying Seasonal + No Trend": (4.76, 8.43, 2.53)},
    "table6_overdiff": {"Linear": (1.562, 1.251, 1.461), "Sine": (1.562, 1.251, 1.461),
                        "Logistic": (1.561, 1.251, 1.461), "Piece. Quad.": (1.562, 1.251, 1.459)},
}
SUITES = tuple(REFERENCE)

# Settings of the simulation study.
GENERATOR = "EP4"
SPECTRAL_DEPTH = 7
SMOOTHER = "mean:64"  # window of 129 bins, i.e. a bin width of about 128
TREND_DEPTH = 6


def worker_count() -> int:
    raw = os.environ.get("TLSW_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"TLSW_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("TLSW_THREADS must be >= 1")
    return n


@dataclass
class Cell:
    row: str
    spectrum: str
    metric: str
    value: float
    sd: float | None = None
    reference: float | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {"row": self.row, "spectrum": self.spectrum, "metric": self.metric,
             "value": self.value, "sd": self.sd, "reference": self.reference}
        d.update(self.extra)
        return d


@dataclass
class BenchmarkReport:
    suite: str
    realisations: int
    seed: int
    T: int
    cells: list
    settings: dict
    elapsed: float = 0.0
    workers: int = 1

    def cell(self, row: str, spectrum: str, metric: str) -> Cell:
        for c in self.cells:
            if (c.row, c.spectrum, c.metric) == (row, spectrum, metric):
                return c
        raise KeyError((row, spectrum, metric))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "realisations": self.realisations, "seed": self.seed,
                "T": self.T, "settings": self.settings,
                "seed_rule": "realisation r uses numpy SeedSequence([seed, r])",
                "cells": [c.as_dict() for c in self.cells]}

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["suite", "row", "spectrum", "metric", "value", "sd", "reference", "n"])
            for c in self.cells:
                w.writerow([self.suite, c.row, c.spectrum, c.metric, f"{c.value:.10g}",
                            "" if c.sd is None else f"{c.sd:.10g}",
                            "" if c.reference is None else c.reference, self.realisations])

    def format_table(self) -> str:
        lines = [f"{self.suite}: {self.realisations} realisations, seed {self.seed}"]
        for c in self.cells:
            sd = "" if c.sd is None else f" ({c.sd:.3f})"
            ref = "" if c.reference is None else f"   [published {c.reference}]"
            lines.append(f"  {c.row:<34s} {c.spectrum}  {c.metric:<18s} {c.value:.4f}{sd}{ref}")
        return "\n".join(lines)


def _map_realisations(fn, n: int, workers: int):
    """Yield ``fn(r)`` for ``r = 0..n-1`` in order, computed by ``workers`` threads."""
    if workers <= 1 or n <= 1:
        for r in range(n):
            yield fn(r)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, range(n))


def _averaged_spectrum_suite(scenarios, spectral_cfgs, n, seed, T, workers):
    """Mean spectrum estimate over realisations for each (scenario, config) key.

    ``scenarios`` maps a key to a :class:`SimConfig`; ``spectral_cfgs`` maps a
    key to the list of ``(label, SpectralConfig)`` evaluated on it.
    """
    def one(r):
        out = {}
        for key, cfg in scenarios.items():
            x = simulate_components(cfg, realisation_rng(seed, r)).x
            for label, sc in spectral_cfgs[key]:
                out[key, label] = estimate_ews(x, sc).S_hat
        return out

    sums = None
    for res in _map_realisations(one, n, workers):
        if sums is None:
            sums = {k: v.copy() for k, v in res.items()}
        else:
            for k, v in res.items():
                sums[k] += v
    return {k: v / n for k, v in sums.items()}


def _mse(avg, truth, mask):
    e = (avg - truth) ** 2
    return float(e[:, mask].mean()), float(e.mean())


def _spectral(detrend: str, depth=SPECTRAL_DEPTH, smoother="none") -> SpectralConfig:
    return SpectralConfig(analysis_filter=GENERATOR, depth=depth, detrend=detrend, smoother=smoother)


def suite_table1(n, seed, T, workers):
    rows = [("None", "zero", "none")] + [(lab, tr, "diff1") for lab, tr in TRENDS]
    scen, cfgs = {}, {}
    for sp in SPECTRA:
        for lab, tr, det in rows:
            scen[lab, sp] = SimConfig(T=T, generator=GENERATOR, spectrum=sp, trend=tr)
            cfgs[lab, sp] = [("est", _spectral(det))]
    avg = _averaged_spectrum_suite(scen, cfgs, n, seed, T, workers)
    mask = interior_mask(parse_filter(GENERATOR), SPECTRAL_DEPTH, T)
    cells = []
    for lab, _, _ in rows:
        for i, sp in enumerate(SPECTRA):
            truth = scen[lab, sp].spectrum.evaluate(T, SPECTRAL_DEPTH)
            interior, full = _mse(avg[(lab, sp), "est"], truth, mask)
            ref = REFERENCE["table1"][lab][i]
            cells.append(Cell(lab, sp, "mse_x1e3_interior", 1e3 * interior, None, ref))
            cells.append(Cell(lab, sp, "mse_x1e3_all", 1e3 * full, None, ref))
    return cells, {"generator": GENERATOR, "analysis": GENERATOR, "depth": SPECTRAL_DEPTH,
                   "smoother": "none", "interior_points": int(mask.sum())}


def _trend_suite(name, innovations, n, seed, T, workers):
    sc = _spectral("diff1", smoother=SMOOTHER)
    tc = TrendConfig(trend_filter="LA4", depth=TREND_DEPTH, rule="hard", transform="TI")
    scen = {(lab, sp): SimConfig(T=T, generator=GENERATOR, spectrum=sp, trend=tr,
                                 innovations=innovations)
            for lab, tr in TRENDS for sp in SPECTRA}

    def one(r):
        out = {}
        for key, cfg in scen.items():
            sim = simulate_components(cfg, realisation_rng(seed, r))
            S = estimate_ews(sim.x, sc)
            out[key] = (float(np.mean((estimate_trend(sim.x, S, tc).mu_hat - sim.trend) ** 2)),
                        float(np.mean((estimate_trend_global_baseline(sim.x, tc).mu_hat
                                       - sim.trend) ** 2)))
        return out

    errs = {k: [] for k in scen}
    for res in _map_realisations(one, n, workers):
        for k, v in res.items():
            errs[k].append(v)
    cells = []
    for lab, _ in TRENDS:
        for i, sp in enumerate(SPECTRA):
            e = np.array(errs[lab, sp])
            ref = REFERENCE[name][lab][i]
            cells.append(Cell(lab, sp, "lswt_mse", float(e[:, 0].mean()), float(e[:, 0].std()), ref))
            cells.append(Cell(lab, sp, "swt_mse", float(e[:, 1].mean()), float(e[:, 1].std()), None))
    return cells, {"generator": GENERATOR, "spectrum_analysis": GENERATOR,
                   "spectral_depth": SPECTRAL_DEPTH, "smoother": SMOOTHER,
                   "trend_filter": "LA4", "trend_depth": TREND_DEPTH, "rule": "hard",
                   "innovations": innovations}


def suite_table5(n, seed, T, workers):
    stat = SeasonalSpec(12, "stationary")
    tv = SeasonalSpec(12, "time_varying")
    rows = [("Seasonal + No Trend", builtin_trend("zero", stat))]
    rows += [(f"Seasonal + {lab}", builtin_trend(tr, stat)) for lab, tr in TRENDS]
    rows += [("Time-Varying Seasonal + No Trend", builtin_trend("zero", tv))]
    scen, cfgs = {}, {}
    for sp in SPECTRA:
        for lab, tr in rows:
            scen[lab, sp] = SimConfig(T=T, generator=GENERATOR, spectrum=sp, trend=tr)
            cfgs[lab, sp] = [("est", _spectral("seasonal:12"))]
    avg = _averaged_spectrum_suite(scen, cfgs, n, seed, T, workers)
    mask = interior_mask(parse_filter(GENERATOR), SPECTRAL_DEPTH, T)
    cells = []
    for lab, _ in rows:
        for i, sp in enumerate(SPECTRA):
            truth = scen[lab, sp].spectrum.evaluate(T, SPECTRAL_DEPTH)
            interior, full = _mse(avg[(lab, sp), "est"], truth, mask)
            ref = REFERENCE["table5_seasonal"][lab][i]
            cells.append(Cell(lab, sp, "mse_x1e3_interior", 1e3 * interior, None, ref))
            cells.append(Cell(lab, sp, "mse_x1e3_all", 1e3 * full, None, ref))
    return cells, {"generator": GENERATOR, "depth": SPECTRAL_DEPTH, "detrend": "seasonal:12",
                   "smoother": "none", "interior_points": int(mask.sum())}


def suite_table6(n, seed, T, workers):
    scen, cfgs = {}, {}
    for sp in SPECTRA:
        for lab, tr in TRENDS:
            scen[lab, sp] = SimConfig(T=T, generator=GENERATOR, spectrum=sp, trend=tr)
            cfgs[lab, sp] = [("d1", _spectral("diff1")), ("d2", _spectral("diff2"))]
    avg = _averaged_spectrum_suite(scen, cfgs, n, seed, T, workers)
    mask = interior_mask(parse_filter(GENERATOR), SPECTRAL_DEPTH, T)
    cells = []
    for lab, _ in TRENDS:
        for i, sp in enumerate(SPECTRA):
            truth = scen[lab, sp].spectrum.evaluate(T, SPECTRAL_DEPTH)
            m1, _ = _mse(avg[(lab, sp), "d1"], truth, mask)
            m2, _ = _mse(avg[(lab, sp), "d2"], truth, mask)
            cells.append(Cell(lab, sp, "mse_ratio_diff2_diff1", m2 / m1, None,
                              REFERENCE["table6_overdiff"][lab][i],
                              {"mse_diff1_x1e3": 1e3 * m1, "mse_diff2_x1e3": 1e3 * m2}))
    return cells, {"generator": GENERATOR, "depth": SPECTRAL_DEPTH, "smoother": "none",
                   "interior_points": int(mask.sum())}


def run_suite(name: str, realisations: int = 100, seed: int = 1, T: int = T_DEFAULT,
              workers: int | None = None) -> BenchmarkReport:
    """Run one suite and return its report."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {SUITES}")
    if realisations < 1:
        raise ConfigError("realisations must be >= 1")
    for sp in SPECTRA:  # validate presets early
        builtin_spectrum(sp)
    if name != "table2_gauss" and name != "table3_exp":
        if not interior_mask(parse_filter(GENERATOR), SPECTRAL_DEPTH, T).any():
            raise ConfigError(f"T={T} leaves no interior points for {SPECTRAL_DEPTH} scales")
    workers = worker_count() if workers is None else int(workers)
    t0 = time.perf_counter()
    if name == "table1":
        cells, settings = suite_table1(realisations, seed, T, workers)
    elif name == "table2_gauss":
        cells, settings = _trend_suite(name, "gaussian", realisations, seed, T, workers)
    elif name == "table3_exp":
        cells, settings = _trend_suite(name, "exponential", realisations, seed, T, workers)
    elif name == "table5_seasonal":
        cells, settings = suite_table5(realisations, seed, T, workers)
    else:
        cells, settings = suite_table6(realisations, seed, T, workers)
    if realisations == 1:
        for c in cells:
            if c.sd is not None:
                c.sd = 0.0
    return BenchmarkReport(name, realisations, int(seed), T, cells, settings,
                           time.perf_counter() - t0, workers)
