"""Compare the compiled and numpy kernels for the dilated circular filter.

    python benchmarks/bench_kernels.py [--length 1024] [--rows 16] [--repeat 50]

Reports the best-of-``repeat`` wall time per call for each backend and filter
and the largest absolute difference between backends.
"""
import argparse
import timeit

import numpy as np

from tlsw.kernels import backends
from tlsw.wavelets import parse_filter


def bench(length, rows, repeat, filters, steps):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((rows, length))
    impls = backends()
    results = []
    for name in filters:
        f = np.ascontiguousarray(parse_filter(name).low_pass)
        for step in steps:
            outs, times = {}, {}
            for be, (conv, corr) in impls.items():
                outs[be] = conv(x, f, step)
                t = timeit.repeat(lambda: (conv(x, f, step), corr(x, f, step)),
                                  number=1, repeat=repeat)
                times[be] = min(t)
            ref = outs["python"]
            diff = max(float(np.max(np.abs(o - ref))) for o in outs.values())
            results.append((name, step, times, diff))
    return results


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--length", type=int, default=1024)
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--repeat", type=int, default=50)
    p.add_argument("--filters", nargs="+", default=["haar", "EP4", "LA8"])
    p.add_argument("--steps", nargs="+", type=int, default=[1, 8, 64])
    args = p.parse_args(argv)
    res = bench(args.length, args.rows, args.repeat, args.filters, args.steps)
    names = sorted({be for _, _, t, _ in res for be in t})
    print(f"rows={args.rows} length={args.length} (conv + corr per call, microseconds)")
    print(f"{'filter':<8}{'step':>6}" + "".join(f"{n:>12}" for n in names)
          + f"{'speedup':>10}{'max|diff|':>12}")
    for name, step, t, diff in res:
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{name:<8}{step:>6}" + "".join(f"{1e6 * t[n]:>12.1f}" for n in names)
              + f"{speed:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
