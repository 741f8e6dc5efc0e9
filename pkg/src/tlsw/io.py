"""Series CSV input/output and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from .errors import ConfigError, NonDyadicLength


def read_series(path) -> np.ndarray:
    """Read a series from CSV.

    Two layouts are accepted: a single column of values (optionally headed by
    a non-numeric label) or a ``time,value`` table with a header row.  Rows are
    taken in file order; the time column is not used for reordering.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    header = None
    try:
        float(rows[0][-1])
    except ValueError:
        header = [c.strip().lower() for c in rows[0]]
        rows = rows[1:]
    col = 0
    if header is not None and len(header) > 1:
        if "value" not in header:
            raise ConfigError(f"{path}: multi-column input needs a 'value' column")
        col = header.index("value")
    elif rows and len(rows[0]) > 1:
        col = 1  # headerless time,value
    values = np.empty(len(rows))
    for i, r in enumerate(rows):
        try:
            values[i] = float(r[col])
        except (ValueError, IndexError):
            line = i + 1 + (header is not None)
            raise ConfigError(f"{path}: line {line}: cannot parse a value from {r!r}") from None
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"{path}: non-finite values in input")
    return values


def write_series(path, x, extra: dict | None = None) -> None:
    """Write ``time_index,value[,extra...]`` with round-trip precision."""
    x = np.asarray(x, dtype=float)
    extra = extra or {}
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_index", "value", *extra])
        cols = [np.asarray(v, dtype=float) for v in extra.values()]
        for k, v in enumerate(x):
            w.writerow([k, f"{v:.17g}", *(f"{c[k]:.17g}" for c in cols)])


def dyadic_prefix(x, truncate: bool = False) -> np.ndarray:
    """Return ``x`` if its length is a power of two, else its largest dyadic prefix.

    Without ``truncate`` a non-dyadic length raises :class:`NonDyadicLength`.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n >= 2 and n & (n - 1) == 0:
        return x
    if not truncate or n < 2:
        raise NonDyadicLength(f"series length {n} is not a power of two (use --pad-truncate)")
    return x[: 1 << (n.bit_length() - 1)]


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(Path(path), "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


class RunManifest:
    """Record of one command: resolved configuration, seeds, inputs, outputs, timings."""

    FILENAME = "manifest.json"

    def __init__(self, command: str, argv=None):
        from . import __version__
        self.command = command
        self.argv = list(sys.argv[1:] if argv is None else argv)
        self.version = __version__
        self.config: dict = {}
        self.seeds: dict = {}
        self.inputs: dict = {}
        self.outputs: dict = {}
        self.timings: dict = {}
        self._t0 = time.perf_counter()

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path) -> None:
        self.outputs[Path(path).name] = file_digest(path)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "version": self.version,
            "config": self.config,
            "seeds": self.seeds,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings": self.timings,
            "environment": {"python": platform.python_version(), "numpy": np.__version__},
        }

    def write(self, out_dir) -> Path:
        self.timings.setdefault("total_seconds", time.perf_counter() - self._t0)
        path = Path(out_dir) / self.FILENAME
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path
