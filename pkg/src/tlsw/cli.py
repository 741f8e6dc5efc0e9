"""Command-line front end: ``tlsw {simulate,estimate-spectrum,estimate-trend,lacv,benchmark}``.

A configuration file is a JSON object with optional sections ``simulation``,
``spectral``, ``trend`` and ``lacv``; for ``simulate`` a bare simulation
object is accepted as well.  Command-line flags override the file.

Exit codes: 0 success, 2 configuration error, 3 numeric error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, benchmark
from .errors import ConfigError, NumericError, ShapeMismatch, TLSWError
from .io import RunManifest, dyadic_prefix, read_series, write_series
from .lacv import LACVEstimate, lacv
from .simulation import SimConfig, realisation_rng, simulate_components
from .spectral import SpectralConfig, SpectrumEstimate, correction_operator, estimate_ews
from .transforms import interior_mask
from .trend import TrendConfig, estimate_trend

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
SECTIONS = ("simulation", "spectral", "trend", "lacv")


# ---------------------------------------------------------------------------
# configuration helpers

def load_config(path) -> dict:
    """Parse a JSON config file, reporting the position of syntax errors."""
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _section(doc: dict, name: str, bare_ok: bool = False) -> dict:
    if name in doc:
        sec = doc[name]
        if not isinstance(sec, dict):
            raise ConfigError(f"config field {name!r} must be an object")
        return dict(sec)
    if bare_ok and not any(k in doc for k in SECTIONS):
        return dict(doc)
    return {}


def _check_sections(doc: dict, bare_ok: bool = False) -> None:
    unknown = set(doc) - set(SECTIONS)
    if unknown and not (bare_ok and not any(k in doc for k in SECTIONS)):
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")


def _spectral_config(doc: dict, args) -> SpectralConfig:
    d = _section(doc, "spectral")
    for key, val in (("detrend", args.detrend), ("smoother", args.smoother),
                     ("depth", args.depth), ("analysis_filter", getattr(args, "filter", None))):
        if val is not None:
            d[key] = val
    try:
        return SpectralConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(f"spectral config: {exc}") from None


def _trend_config(doc: dict, args) -> TrendConfig:
    d = _section(doc, "trend")
    for key, val in (("trend_filter", args.trend_filter), ("depth", args.trend_depth),
                     ("rule", args.rule)):
        if val is not None:
            d[key] = val
    try:
        return TrendConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(f"trend config: {exc}") from None


def _sim_config(doc: dict, args) -> SimConfig:
    d = _section(doc, "simulation", bare_ok=True)
    if getattr(args, "preset", None):
        spec, _, trend = args.preset.partition("+")
        d["spectrum"] = spec
        d["trend"] = trend or "zero"
    if getattr(args, "length", None) is not None:
        d["T"] = args.length
    if args.seed is not None:
        d["seed"] = args.seed
    return SimConfig.from_dict(d)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_input(args, manifest: RunManifest) -> np.ndarray:
    x = read_series(args.input)
    manifest.add_input(args.input)
    n = x.size
    x = dyadic_prefix(x, args.pad_truncate)
    if x.size != n:
        manifest.config["truncated_from"] = n
    return x


def read_spectrum(path, cfg: SpectralConfig | None = None) -> SpectrumEstimate:
    """Rebuild a :class:`SpectrumEstimate` from the long CSV written by ``estimate-spectrum``.

    The analysis settings come from the sibling ``.json`` file when it exists,
    otherwise from ``cfg``.
    """
    path = Path(path)
    side = path.with_suffix(".json")
    if side.exists():
        meta = load_config(side)
        cfg = SpectralConfig.from_dict(meta.get("config", {}))
    cfg = SpectralConfig() if cfg is None else cfg
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"scale", "time_index", "value"} <= set(rows[0]):
        raise ConfigError(f"{path}: expected columns scale,time_index,value")
    scale = np.array([int(r["scale"]) for r in rows])
    k = np.array([int(r["time_index"]) for r in rows])
    J, T = int(scale.max()), int(k.max()) + 1
    if scale.min() < 1 or J * T != len(rows):
        raise ShapeMismatch(f"{path}: incomplete scale x time grid")
    S = np.zeros((J, T))
    S[scale - 1, k] = [float(r["value"]) for r in rows]
    M, _ = correction_operator(cfg.analysis_filter, J, cfg.detrend)
    neg = tuple(int(c) for c in (S < 0).sum(axis=1))
    return SpectrumEstimate(S, cfg, M, neg, M.condition_number())


# ---------------------------------------------------------------------------
# commands

def cmd_simulate(args, manifest: RunManifest) -> int:
    doc = load_config(args.config)
    _check_sections(doc, bare_ok=True)
    cfg = _sim_config(doc, args)
    out = _out_dir(args)
    n = args.replicates
    manifest.config = {"simulation": cfg.to_dict(), "replicates": n}
    manifest.seeds = {"seed": int(cfg.seed),
                      "rule": ("numpy default_rng(seed)" if n == 1
                               else "replicate r uses numpy SeedSequence([seed, r])")}
    t0 = time.perf_counter()
    for r in range(n):
        rng = cfg.rng() if n == 1 else realisation_rng(cfg.seed, r)
        sim = simulate_components(cfg, rng)
        name = "series.csv" if n == 1 else f"series_{r:04d}.csv"
        write_series(out / name, sim.x)
        manifest.add_output(out / name)
    manifest.timings["simulate_seconds"] = time.perf_counter() - t0
    (out / "simulation.json").write_text(cfg.to_json() + "\n", encoding="utf-8")
    manifest.add_output(out / "simulation.json")
    return EXIT_OK


def _spectrum_from_replicates(doc, args, scfg, manifest):
    sim = _sim_config(doc, args)
    n = args.replicates
    workers = benchmark.worker_count()
    manifest.config["simulation"] = sim.to_dict()
    manifest.seeds = {"seed": int(sim.seed),
                      "rule": "replicate r uses numpy SeedSequence([seed, r])"}

    def one(r):
        return estimate_ews(simulate_components(sim, realisation_rng(sim.seed, r)).x, scfg)

    total, first = None, None
    for est in benchmark._map_realisations(one, n, workers):
        if total is None:
            first, total = est, est.S_hat.copy()
        else:
            total += est.S_hat
    S = total / n
    neg = tuple(int(c) for c in (S < 0).sum(axis=1))
    avg = SpectrumEstimate(S, scfg, first.correction_matrix, neg, first.condition_number)
    truth = sim.spectrum.evaluate(sim.T, avg.depth)
    mask = interior_mask(scfg.analysis_filter, avg.depth, sim.T)
    err = (S - truth) ** 2
    summary = {"replicates": n,
               "row_means": {str(-(i + 1)): float(v) for i, v in enumerate(S.mean(axis=1))},
               "mse_x1e3_interior": 1e3 * float(err[:, mask].mean()),
               "mse_x1e3_all": 1e3 * float(err.mean())}
    return avg, summary


def cmd_estimate_spectrum(args, manifest: RunManifest) -> int:
    doc = load_config(args.config)
    _check_sections(doc)
    scfg = _spectral_config(doc, args)
    out = _out_dir(args)
    manifest.config = {"spectral": scfg.to_dict()}
    t0 = time.perf_counter()
    summary = None
    if args.input is not None:
        est = estimate_ews(_load_input(args, manifest), scfg)
    else:
        if "simulation" not in doc and args.preset is None:
            raise ConfigError("give an input series, or a simulation section / --preset to replicate")
        if args.filter is None and "analysis_filter" not in _section(doc, "spectral"):
            gen = _sim_config(doc, args).generator
            scfg = SpectralConfig.from_dict({**scfg.to_dict(), "analysis_filter": gen.name})
            manifest.config["spectral"] = scfg.to_dict()
        est, summary = _spectrum_from_replicates(doc, args, scfg, manifest)
    manifest.timings["estimate_seconds"] = time.perf_counter() - t0
    est.to_csv(out / "spectrum.csv")
    est.to_json(out / "spectrum.json")
    if summary is not None:
        meta = json.loads((out / "spectrum.json").read_text())
        meta["replicate_summary"] = summary
        (out / "spectrum.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        print(json.dumps(summary, indent=2, sort_keys=True))
    for name in ("spectrum.csv", "spectrum.json"):
        manifest.add_output(out / name)
    manifest.config["diagnostics"] = est.diagnostics()
    return EXIT_OK


def cmd_estimate_trend(args, manifest: RunManifest) -> int:
    if (args.spectrum is None) == (not args.auto):
        raise ConfigError("estimate-trend needs exactly one of --spectrum FILE or --auto")
    doc = load_config(args.config)
    _check_sections(doc)
    tcfg = _trend_config(doc, args)
    x = _load_input(args, manifest)
    out = _out_dir(args)
    t0 = time.perf_counter()
    if args.auto:
        scfg = _spectral_config(doc, args)
        S = estimate_ews(x, scfg)
    else:
        S = read_spectrum(args.spectrum, _spectral_config(doc, args))
        manifest.add_input(args.spectrum)
    est = estimate_trend(x, S, tcfg)
    manifest.timings["estimate_seconds"] = time.perf_counter() - t0
    manifest.config = {"spectral": S.config.to_dict(), "trend": tcfg.to_dict(),
                       "spectrum_source": "auto" if args.auto else str(args.spectrum),
                       "negatives_repaired": est.negatives_repaired,
                       "coefficients_kept": est.survivors}
    est.to_csv(out / "trend.csv")
    manifest.add_output(out / "trend.csv")
    return EXIT_OK


def cmd_lacv(args, manifest: RunManifest) -> int:
    if (args.spectrum is None) == (args.input is None):
        raise ConfigError("lacv needs exactly one of an input series or --spectrum FILE")
    doc = load_config(args.config)
    _check_sections(doc)
    ld = _section(doc, "lacv")
    unknown = set(ld) - {"J0", "max_lag"}
    if unknown:
        raise ConfigError(f"unknown lacv settings: {sorted(unknown)}")
    J0 = args.j0 if args.j0 is not None else ld.get("J0")
    max_lag = args.max_lag if args.max_lag is not None else ld.get("max_lag")
    out = _out_dir(args)
    t0 = time.perf_counter()
    if args.input is not None:
        S = estimate_ews(_load_input(args, manifest), _spectral_config(doc, args))
    else:
        S = read_spectrum(args.spectrum, _spectral_config(doc, args))
        manifest.add_input(args.spectrum)
    est: LACVEstimate = lacv(S, J0=J0, max_lag=max_lag)
    manifest.timings["estimate_seconds"] = time.perf_counter() - t0
    manifest.config = {"spectral": S.config.to_dict(),
                       "lacv": {"J0": est.J0, "max_lag": est.max_lag},
                       "negative_variance_count": est.negative_variance_count}
    est.to_csv(out / "lacv.csv")
    manifest.add_output(out / "lacv.csv")
    return EXIT_OK


def cmd_benchmark(args, manifest: RunManifest) -> int:
    suites = benchmark.SUITES if args.suite == "all" else (args.suite,)
    out = _out_dir(args)
    seed = 1 if args.seed is None else args.seed
    manifest.seeds = {"seed": seed, "rule": "realisation r uses numpy SeedSequence([seed, r])"}
    manifest.config = {"suites": list(suites), "realisations": args.replicates,
                       "T": args.length, "workers": benchmark.worker_count()}
    for name in suites:
        rep = benchmark.run_suite(name, args.replicates, seed, args.length)
        manifest.timings[f"{name}_seconds"] = rep.elapsed
        manifest.config[f"{name}_settings"] = rep.settings
        rep.to_json(out / f"{name}.json")
        rep.to_csv(out / f"{name}.csv")
        manifest.add_output(out / f"{name}.json")
        manifest.add_output(out / f"{name}.csv")
        print(rep.format_table())
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "estimate-spectrum": cmd_estimate_spectrum,
            "estimate-trend": cmd_estimate_trend, "lacv": cmd_lacv, "benchmark": cmd_benchmark}


# ---------------------------------------------------------------------------
# parser

def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tlsw", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=_u64, help="random seed (unsigned 64-bit)")
    common.add_argument("--replicates", type=_positive,
                        help="number of seeded realisations (default 1; 100 for benchmark)")
    common.add_argument("--out", default=".", help="output directory (created if missing)")

    est = argparse.ArgumentParser(add_help=False)
    est.add_argument("--detrend", help="none, diff1, diff2 or seasonal:<L>")
    est.add_argument("--smoother", help="mean:<W>, mean, ti or none")
    est.add_argument("--depth", type=_positive, help="number of analysis scales J1")
    est.add_argument("--filter", help="analysis wavelet, e.g. haar, EP4, LA8")
    est.add_argument("--pad-truncate", action="store_true",
                     help="truncate the input to its largest power-of-two prefix")

    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("simulate", parents=[common], help="simulate a trended LSW series")
    s.add_argument("--preset", help="spectrum[+trend], e.g. S1+linear")
    s.add_argument("--length", type=_positive, help="series length T (power of two)")

    s = sub.add_parser("estimate-spectrum", parents=[common, est],
                       help="bias-corrected evolutionary wavelet spectrum")
    s.add_argument("input", nargs="?", help="series CSV (omit to replicate a simulation)")
    s.add_argument("--preset", help="simulation preset when no input is given")
    s.add_argument("--length", type=_positive, help="T for the simulation preset")

    s = sub.add_parser("estimate-trend", parents=[common, est], help="wavelet trend estimate")
    s.add_argument("input", help="series CSV")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--spectrum", help="spectrum CSV from estimate-spectrum")
    g.add_argument("--auto", action="store_true", help="estimate the spectrum first")
    s.add_argument("--trend-filter", help="trend wavelet (default LA4)")
    s.add_argument("--trend-depth", type=_positive, help="number of thresholded scales")
    s.add_argument("--rule", choices=("hard", "soft"))

    s = sub.add_parser("lacv", parents=[common, est], help="local autocovariance")
    s.add_argument("input", nargs="?", help="series CSV")
    s.add_argument("--spectrum", help="spectrum CSV from estimate-spectrum")
    s.add_argument("--j0", type=_positive, help="number of scales summed")
    s.add_argument("--max-lag", type=int, help="largest lag")

    s = sub.add_parser("benchmark", parents=[common], help="Monte Carlo table reproduction")
    s.add_argument("--suite", default="all", choices=benchmark.SUITES + ("all",))
    s.add_argument("--length", type=_positive, default=benchmark.T_DEFAULT, help="series length")
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.replicates is None:
        args.replicates = 100 if args.command == "benchmark" else 1
    manifest = RunManifest(args.command, argv)
    try:
        code = COMMANDS[args.command](args, manifest)
        manifest.write(args.out)
        return code
    except NumericError as exc:
        print(f"tlsw: numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"tlsw: config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TLSWError as exc:
        print(f"tlsw: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"tlsw: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
