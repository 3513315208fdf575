"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row times one kernel on one group with both backends and checks that
the two results agree.
"""

import argparse
import time

import numpy as np

from ultraharm import engel, g52, heisenberg, kernels
from ultraharm.dual import dual
from ultraharm.fourier import GridFunction, forward, inverse
from ultraharm.group import all_coords, multiply_arrays, ranks_of


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def with_backend(name, fn):
    old = kernels.backend()
    kernels.set_backend(name)
    try:
        return fn()
    finally:
        kernels.set_backend(old)


def cases():
    rng = np.random.default_rng(7)
    for g in (heisenberg(3, 1, 2), heisenberg(3, 1, 3), engel(3, 2), g52(3, 2)):
        f = GridFunction.random(g, rng)
        fhat = forward(f)
        yield f"forward {g.name} N={g.level}", lambda f=f: forward(f, workers=1).entries, "symbol"
        yield f"inverse {g.name} N={g.level}", lambda s=fhat: inverse(s, workers=1).values, "array"
    g = g52(3, 2)
    X = all_coords(g)
    irreps = [pi for pi in dual(g, 2).irreps if pi.dim > 1][:40]
    yield "eigen-one counts G_5,2(Z_3) N=2", lambda: np.concatenate(
        [kernels.eigen_one_counts(pi, X) for pi in irreps]), "array"
    g = engel(3, 1)
    X = all_coords(g)
    tables = kernels.PairTables(dual(g, 1).irreps, X)
    grid = np.arange(len(X))
    prod = ranks_of(g, multiply_arrays(g, X[:, None, :], X[None, :, :]))
    yield "homomorphism B_4(Z_3) all pairs", lambda: kernels.homomorphism_residual(
        tables, grid, np.broadcast_to(grid, prod.shape), prod), "scalar"


def difference(a, b, kind):
    if kind == "symbol":
        return max(float(np.max(np.abs(a[k] - b[k]))) for k in a)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in kernels.available_backends():
        raise SystemExit("the compiled extension is not built; run `pip install -e . --no-build-isolation`")
    print(f"{'kernel':40s} {'cython [s]':>11s} {'python [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for label, fn, kind in cases():
        tc, rc = with_backend("cython", lambda: best_of(fn, args.repeat))
        tp, rp = with_backend("python", lambda: best_of(fn, args.repeat))
        print(f"{label:40s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f} {difference(rc, rp, kind):10.2e}")


if __name__ == "__main__":
    main()
