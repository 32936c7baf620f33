"""Time the compiled and pure-Python kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from rowsample import kernels
from rowsample.generators import leverage_one_spike


def cases(rng):
    a = rng.standard_normal((1 << 14, 8))
    yield "fwht 16384x8", lambda impl: kernels.fwht(a.copy(), impl=impl)
    b = rng.standard_normal((4096, 16))
    yield "householder_qr 4096x16", lambda impl: kernels.householder_qr(b, impl=impl)
    target = leverage_one_spike(10_000, 5, 50 * 5 / 10_000).sorted_desc

    def chase(impl):
        q = np.zeros((10_000, 5))
        q[:5, :5] = np.eye(5)
        kernels.givens_chase(q, target, 5e-12, impl=impl)

    yield "givens_chase m=10000 n=5", chase


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    print("%-26s" % "kernel" + "".join("%14s" % name for name in backends) + "%10s" % "speedup")
    for name, fn in cases(rng):
        best = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
                for b, mod in backends.items()}
        line = "%-26s" % name + "".join("%12.2fms" % (1e3 * t) for t in best.values())
        if "cython" in best:
            line += "%9.1fx" % (best["python"] / best["cython"])
        print(line)


if __name__ == "__main__":
    main()
