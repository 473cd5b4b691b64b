"""Compiled vs pure-Python cycle kernel on one design.

    python benchmarks/bench_simulate.py [design.yaml] [--repeat N]

The program arrays are built once; only the kernel call is timed, and both
kernels must return identical results.
"""
import argparse
import statistics
import time
from importlib.resources import files
from pathlib import Path

import numpy as np

from cisenergy.design import load_design_file
from cisenergy.timing.program import build_program
from cisenergy.timing.simulate import BACKENDS

DEFAULT = Path(str(files("cisenergy") / "designs" / "rhythmic" / "2d_in.yaml"))


def time_kernel(fn, prog, repeat):
    times, raw = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        raw = fn(prog.arrays, prog.base_clock, prog.max_cycles, prog.patience)
        times.append(time.perf_counter() - t0)
    return times, raw


def same(a, b):
    return a.keys() == b.keys() and all(np.array_equal(np.asarray(a[k]), np.asarray(b[k])) for k in a)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("design", nargs="?", default=str(DEFAULT))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    g, hw, m, gl = load_design_file(args.design)
    t0 = time.perf_counter()
    prog = build_program(g, hw, m, gl.bit_depth)
    print(f"design {args.design}")
    print(f"program build: {(time.perf_counter() - t0) * 1e3:.1f} ms")

    results = {}
    for name in sorted(BACKENDS):
        times, raw = time_kernel(BACKENDS[name], prog, args.repeat)
        results[name] = (statistics.median(times), raw)
        print(f"{name:>7}: median {results[name][0] * 1e3:9.2f} ms over {args.repeat} run(s), "
              f"{int(raw['unit_last'].max())} cycles")
    if len(results) == 2:
        (tc, rc), (tp, rp) = results["cython"], results["python"]
        print(f"speed-up: {tp / tc:.1f}x, results identical: {same(rc, rp)}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
