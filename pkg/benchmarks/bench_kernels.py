"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row times one kernel on both backends with identical random inputs,
checks that the outputs agree, and reports the speed-up.  A final row times
a full field-level workload (exp/log inverse check on a t-module) end to end.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from anderson_forge import kernels
from anderson_forge.ff import get_gf


def _planes(rng, p, k, n):
    return rng.integers(0, p, size=(k, n), dtype=np.int64)


def cases(rng):
    for p, k, n in ((2, 1, 2000), (2, 4, 400), (3, 2, 600), (7, 3, 300)):
        red = get_gf(p, k).reduction
        a, b = _planes(rng, p, k, n), _planes(rng, p, k, n)
        yield f"conv_planes p={p} k={k} n={n}", lambda a=a, b=b, red=red, p=p, n=n: kernels._backend.conv_planes(
            a, b, red, p, n
        )
    for p, n, d in ((2, 4000, 300), (5, 2000, 200)):
        a = rng.integers(0, p, n, dtype=np.int64)
        b = rng.integers(0, p, d, dtype=np.int64)
        b[-1] = 1
        yield f"divmod_prime p={p} {n}/{d}", lambda a=a, b=b, p=p: kernels.divmod_prime(a, b, p)


def workload():
    from anderson_forge import drinfeld
    from anderson_forge.suites import SuiteConfig, chk_exp_log

    drinfeld._COEFF_CACHE.clear()
    ok, _, detail = chk_exp_log(SuiteConfig(s=0), "En", 2, 1, 10, 0)
    if not ok:
        raise SystemExit(f"workload failed: {detail}")


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    try:
        kernels.use_backend("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speed-up':>9s}")
    for name, fn in list(cases(rng)) + [("exp/log E_1 r=2 q=2 N=10", workload)]:
        row = {}
        outs = {}
        for backend in ("cython", "python"):
            kernels.use_backend(backend)
            outs[backend] = fn()
            row[backend] = _time(fn, args.repeat) * 1e3
        if name != "exp/log E_1 r=2 q=2 N=10":
            same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(_tup(outs["cython"]), _tup(outs["python"])))
            if not same:
                raise SystemExit(f"backends disagree on {name}")
        print(f"{name:32s} {row['cython']:12.2f} {row['python']:12.2f} {row['python'] / row['cython']:8.1f}x")
    kernels.use_backend("cython")


def _tup(x):
    return x if isinstance(x, tuple) else (x,)


if __name__ == "__main__":
    main()
