"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N] [--json]

Each kernel runs on the same inputs under both backends; results must agree.
"""
from __future__ import annotations

import argparse
import json
import random
import statistics
import time

from coarse_complex import _kernels_py, fixtures, kernels
from coarse_complex.metric import FiniteMetricSpace, common_scale
from coarse_complex.subdivision import barycentric_subdivide


def _space(rng, n):
    D = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            D[i][j] = D[j][i] = rng.randint(1, 12)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                D[i][j] = min(D[i][j], D[i][k] + D[k][j])
    return FiniteMetricSpace(D)


def cases():
    rng = random.Random(0)
    sd = barycentric_subdivide(fixtures.cp2()).K_sub
    q = 2
    rows = sd.boundary_matrix(q).col_dicts()
    yield "sparse_rank sd(CP2) 3->2", "sparse_rank", (rows, len(sd.cells(q)))

    X, Y = _space(rng, 7), _space(rng, 7)
    (DX, DY), _ = common_scale(X, Y)
    # largest infeasible threshold: the search has to exhaust every branch
    t = 0
    while _kernels_py.correspondence_search(DX, DY, t + 1) is None:
        t += 1
    yield f"correspondence_search 7x7 t={t}", "correspondence_search", (DX, DY, t)

    X, Y = _space(rng, 4), _space(rng, 4)
    (DX, DY), scale = common_scale(X, Y)
    yield "best_map_pair 4x4", "best_map_pair", (DX, DY, scale)

    X, Y = _space(rng, 8), _space(rng, 8)
    (DX, DY), _ = common_scale(X, Y)
    yield "best_bijection 8", "best_bijection", (DX, DY)


def timeit(fn, args, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    if "cython" not in kernels.available_backends():
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1
    from coarse_complex import _kernels

    rows = []
    for label, name, inputs in cases():
        t_py, r_py = timeit(getattr(_kernels_py, name), inputs, args.repeat)
        t_cy, r_cy = timeit(getattr(_kernels, name), inputs, args.repeat)
        if (r_py is None) != (r_cy is None) or (name != "correspondence_search" and r_py != r_cy):
            raise SystemExit(f"{label}: backends disagree")
        rows.append({"kernel": label, "python_s": t_py, "cython_s": t_cy, "speedup": t_py / t_cy})

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'kernel':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
        for r in rows:
            print(f"{r['kernel']:32s} {r['python_s']:11.4f} {r['cython_s']:11.4f} {r['speedup']:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
