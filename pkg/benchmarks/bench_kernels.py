"""Compare the compiled kernels with the numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from minannuli import _pykernels
from minannuli.annulus import build_chart
from minannuli.graphsolver import PolarGrid

try:
    from minannuli import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    diag, off = rng.normal(size=4000), rng.normal(size=3999)
    yield "sturm_count n=4000", lambda k: k.sturm_count(diag, off, 0.1)
    grid = PolarGrid(128, 128)
    u = 0.1 * rng.normal(size=grid.n_nodes)
    yield "graph_assemble 128x128", lambda k: k.graph_assemble(u, grid.tri, grid.grads, grid.w_area,
                                                              grid.F_centroid)
    ch = build_chart(h=0.8, n_t=97, n_theta=96)
    v = 1e-3 * rng.normal(size=ch.n_nodes)
    yield "area_assemble 97x96 grad", lambda k: k.area_assemble(ch.X0, ch.nvec, v, ch.tri, ch.weight, False)
    yield "area_assemble 97x96 hess", lambda k: k.area_assemble(ch.X0, ch.nvec, v, ch.tri, ch.weight, True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:28s} {t_py:12.3f} {'n/a':>12s} {'n/a':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {t_py:12.3f} {t_c:12.3f} {t_py / t_c:8.1f}")


if __name__ == "__main__":
    main()
