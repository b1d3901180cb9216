"""Compare the pure-Python and compiled kernel backends.

Run ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Both backends are
fed identical inputs; results are checked for equality before timing.
"""

import argparse
import random
import time

from gmpy2 import mpq

from higherspin import _pykernels

try:
    from higherspin import _ckernels
except ImportError:
    _ckernels = None


def random_raw(rng, nvars, degree, nterms):
    out = {}
    for _ in range(nterms):
        e = [0] * nvars
        for _ in range(degree):
            e[rng.randrange(nvars)] += 1
        out[tuple(e)] = mpq(rng.randint(-9, 9), rng.randint(1, 5))
    return {k: v for k, v in out.items() if v}


def random_rows(rng, nrows, ncols, density):
    rows = []
    for _ in range(nrows):
        r = {c: rng.randint(-20, 20) for c in range(ncols) if rng.random() < density}
        rows.append({c: v for c, v in r.items() if v})
    return rows


def workloads(seed=0):
    rng = random.Random(seed)
    m, k = 6, 2
    n = (k + 1) * m
    a = random_raw(rng, n, 6, 400)
    b = random_raw(rng, n, 3, 60)
    rows = random_rows(rng, 160, 200, 0.06)
    return {
        "mul": lambda K: K.mul(a, b),
        "apply_ud": lambda K: K.apply_ud(a, 1, 0, m),
        "apply_dd": lambda K: K.apply_dd(a, 1, 0, m),
        "laplacian": lambda K: K.apply_dd(a, 0, 0, m),
        "mul_uu": lambda K: K.mul_uu(a, 1, 2, m),
        "diff": lambda K: K.diff(a, 3),
        "fischer": lambda K: K.fischer(a, a),
        "nullspace": lambda K: K.nullspace(rows, 200),
    }


def bench(fn, K, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(K)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled backend not built; timing the pure-Python kernels only")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in workloads().items():
        results = [fn(K) for _, K in backends]
        if any(r != results[0] for r in results[1:]):
            raise SystemExit(f"backends disagree on {name}")
        times = [bench(fn, K, args.repeat) for _, K in backends]
        line = f"{name:<12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>11.2f}x"
        print(line)


if __name__ == "__main__":
    main()
