"""Time the numba kernels against their numpy twins on identical inputs.

    python3 benchmarks/bench_kernels.py            # default sizes
    python3 benchmarks/bench_kernels.py --quick    # small smoke run

Each row reports the best of ``--repeat`` timings per backend and checks that
both backends return the same result (exact for hit counts, 1e-13 relative
otherwise).  The first numba call per kernel compiles or loads the cache and
is excluded.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from bstunnel.kernels import numba_impl, numpy_impl
from bstunnel.montecarlo import chunk_stream


def _cases(runs: int, n_tags: int, n_nodes: int):
    rng = chunk_stream(2024, 0)
    x2 = rng.standard_exponential((runs, n_tags))
    y2 = rng.standard_exponential((runs, n_tags))
    phase = rng.uniform(0.0, 2 * np.pi, (runs, n_tags))
    h2 = rng.standard_exponential(runs)
    inv_c = 1.0 / np.linspace(2.0, 40.0, n_tags)
    w = inv_c**2
    u = -np.log(np.linspace(1e-9, 1.0 - 1e-9, n_nodes))
    x = np.logspace(-3, 8, n_nodes * n_tags)
    return {
        "count_hits/random": lambda impl: impl.count_hits(x2, y2, phase, h2, inv_c, 100.0, True),
        "count_hits/aligned": lambda impl: impl.count_hits(x2, y2, np.empty((0, 0)), h2, inv_c, 100.0, False),
        "laplace_product": lambda impl: impl.laplace_product(u, w, 100.0),
        "e1_scaled": lambda impl: impl.e1_scaled(x),
    }


def _same(a, b) -> bool:
    if np.isscalar(a) or np.ndim(a) == 0:
        return a == b
    return bool(np.allclose(a, b, rtol=1e-13, atol=0.0))


def run(runs: int, n_tags: int, n_nodes: int, repeat: int, out=sys.stdout) -> list[tuple]:
    if numba_impl is None:
        print("numba path disabled or unavailable; nothing to compare", file=out)
        return []
    rows = []
    print(f"runs={runs} tags={n_tags} nodes={n_nodes} repeat={repeat}", file=out)
    print(f"{'kernel':<20}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  match", file=out)
    for name, call in _cases(runs, n_tags, n_nodes).items():
        ref = call(numpy_impl)
        got = call(numba_impl)  # warm-up: compile or load from cache
        t_np = min(timeit.repeat(lambda: call(numpy_impl), number=1, repeat=repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: call(numba_impl), number=1, repeat=repeat)) * 1e3
        match = _same(ref, got)
        rows.append((name, t_np, t_nb, match))
        print(f"{name:<20}{t_np:>12.2f}{t_nb:>12.2f}{t_np / t_nb:>9.1f}x  {'yes' if match else 'NO'}", file=out)
    return rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--tags", type=int, default=40)
    p.add_argument("--nodes", type=int, default=2_000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--quick", action="store_true", help="tiny sizes for a smoke run")
    args = p.parse_args(argv)
    if args.quick:
        args.runs, args.tags, args.nodes, args.repeat = 2_000, 8, 100, 2
    rows = run(args.runs, args.tags, args.nodes, args.repeat)
    return 0 if all(r[3] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
