"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Times the SDE stepper, the Philox normal generator and the float Jack
solve on both backends and reports the speedup and the largest relative
output difference between them.
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from chamber_bessel import _backend
from chamber_bessel.jack import compute_layer
from chamber_bessel.rootsys import Multiplicity, build_root_system
from chamber_bessel.simulate import SdeConfig, simulate


def _best(fn, repeat: int):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    d3 = SdeConfig(build_root_system("D", 3), Multiplicity(1.0), (2.0, 1.0, 0.3), 1.0, 1e-3, 2000, 1)
    b2 = SdeConfig(build_root_system("B", 2), Multiplicity(1.0, 1.0), (1.5, 0.5), 1.0, 1e-3, 5000, 1)
    paths = np.arange(200_000)
    return {
        "simulate D3 2000x1000": lambda k: simulate(d3, k.NAME).terminal,
        "simulate B2 5000x1000": lambda k: simulate(b2, k.NAME).terminal,
        "std_normals 200000x4": lambda k: k.std_normals(5, paths, 0, 0, 4),
        "jack layer n=16 m=4": lambda k: compute_layer(16, 4, 0.37, k)[1].coeffs,
        "jack layer n=40 m=4": lambda k: compute_layer(40, 4, 1.7, k)[1].coeffs,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    backends = _backend.available()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy fallback is timed")
    rows = []
    print(f"{'case':<26s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}{'max rel':>12s}")
    for name, fn in cases().items():
        times, outs = {}, {}
        fn(_backend.load(backends[-1]))  # warm shared caches before timing either backend
        for b in backends:
            k = _backend.load(b)
            times[b], outs[b] = _best(lambda: fn(k), args.repeat)
        speed = times["python"] / times["cython"] if "cython" in times else 1.0
        a, b = outs["python"], outs[backends[0]]
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        rows.append({"case": name, "seconds": times, "speedup": speed, "max_rel_diff": diff})
        print(f"{name:<26s}" + "".join(f"{times[b]:>11.4f}s" for b in backends) + f"{speed:>9.1f}x{diff:>12.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
