"""Time the compiled kernels against the pure-Python fallback.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat R] [--quick]``

Each kernel is called through both modules directly, so one process measures
both backends regardless of ``CWNET_BACKEND``. Results go to stdout as a
table; ``--json`` writes them machine-readably instead.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from cwnet import _fallback

try:
    from cwnet import _kernels
except ImportError:
    _kernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def _eig(mod, a):
    def run():
        d, e, zt = mod.householder_tridiagonal(a)
        d = np.ascontiguousarray(d)
        e = np.ascontiguousarray(e)
        zt = np.ascontiguousarray(zt)
        mod.tql_implicit(d, e, zt, 30 * a.shape[0])
    return run


def _cycles(mod, n, rng):
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.45:
                adj[i, j] = adj[j, i] = 1
    phase = np.zeros((n, n))
    return lambda: mod.cycle_flags(adj, phase, 1e-9)


def _lloyd(mod, m, k, rng):
    pts = rng.normal(size=(m, 4))
    centers = pts[:k].copy()
    return lambda: mod.lloyd(pts, centers.copy(), 300, 1e-6)


def cases(quick):
    rng = np.random.default_rng(0)
    eig_sizes = (40, 120) if quick else (40, 120, 300)
    out = []
    for n in eig_sizes:
        a = _hermitian(n, rng)
        out.append((f"eig n={n}", lambda mod, a=a: _eig(mod, a)))
    for n in ((9,) if quick else (9, 11)):
        seed = int(rng.integers(1 << 31))
        out.append((f"cycle_flags n={n}",
                     lambda mod, n=n, s=seed: _cycles(mod, n, np.random.default_rng(s))))
    for m in ((600,) if quick else (600, 3000)):
        seed = int(rng.integers(1 << 31))
        out.append((f"lloyd m={m} k=6",
                     lambda mod, m=m, s=seed: _lloyd(mod, m, 6, np.random.default_rng(s))))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    rows = []
    for name, make in cases(args.quick):
        py = _best(make(_fallback), args.repeat)
        cc = _best(make(_kernels), args.repeat) if _kernels is not None else float("nan")
        rows.append({"case": name, "python_s": py, "compiled_s": cc, "speedup": py / cc})
    if args.json:
        json.dump(rows, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0
    if _kernels is None:
        print("compiled extension not built; only the fallback was timed")
    print(f"{'case':<22}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for r in rows:
        print(f"{r['case']:<22}{r['python_s']:>12.4f}{r['compiled_s']:>14.5f}{r['speedup']:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
