"""Wall-time comparison of the numba kernels against the numpy fallback.

Usage: python benchmarks/bench_backends.py [n_paths]

Runs the same killed-path workloads through both engines in one process
(the numba path is warmed first so compilation is excluded) and prints a
small table. Statistical agreement between the engines is covered by the
test suite; this script measures speed only.
"""

from __future__ import annotations

import sys
import time

import numpy as np

import anisotable as at
import anisotable.sampling.paths as paths_mod
from anisotable.sampling import SchemeParams, run_paths


def workloads(n):
    sym = at.validate(1.5, 1, at.ConstantDensity(1.0))
    asym = at.validate(0.8, 1, at.HemisphereDensity(np.array([1.0]), 2.0, 1.0))
    iso2 = at.validate(1.0, 2, at.ConstantDensity(1.0))
    return [
        ("halfline sym a=1.5", sym, at.HalfSpace(np.array([1.0])), np.array([1.0]),
         4.0, SchemeParams(eps=0.05, delta=1 / 64, small_jump_mode="gaussian"), n),
        ("halfline asym a=0.8", asym, at.HalfSpace(np.array([-1.0])), np.array([-1.0]),
         8.0, SchemeParams(eps=0.01, delta=0.04, small_jump_mode="gaussian"), n),
        ("halfplane iso a=1.0", iso2, at.HalfSpace(np.array([0.0, 1.0])),
         np.array([0.0, 1.0]), 4.0, SchemeParams(eps=0.05, delta=0.05), n // 2),
    ]


def time_backend(have_numba: bool, n: int) -> dict:
    paths_mod.HAVE_NUMBA = have_numba
    out = {}
    for name, model, dom, x0, t, sch, npaths in workloads(n):
        t0 = time.perf_counter()
        b = run_paths(model, dom, x0, t, sch, 1234, 0, npaths)
        out[name] = (time.perf_counter() - t0, float(b.survived.mean()))
    return out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 40_000
    if not at.HAVE_NUMBA:
        print("numba unavailable; benchmarking the numpy engine only")
        for name, (dt, p) in time_backend(False, n).items():
            print(f"{name:24s} numpy {dt:8.2f}s  (surv={p:.4f})")
        return
    # warm the kernels (compilation excluded from timing)
    time_backend(True, max(n // 20, 500))
    nb = time_backend(True, n)
    np_ = time_backend(False, n)
    paths_mod.HAVE_NUMBA = True
    print(f"{'workload':24s} {'numba':>9s} {'numpy':>9s} {'speedup':>8s}")
    for name in nb:
        a, pa = nb[name]
        b, pb = np_[name]
        print(f"{name:24s} {a:8.2f}s {b:8.2f}s {b / a:7.1f}x   "
              f"(surv {pa:.4f} vs {pb:.4f})")


if __name__ == "__main__":
    main()
