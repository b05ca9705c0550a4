"""Compare the compiled and pure-Python search kernels.

Each cover-search case asks whether C(v, k, t) blocks minus one suffice,
which forces the full infeasibility proof.  The independence cases run the
maximum n-independent set search on seeded random multigraphs.

    python benchmarks/bench_kernels.py --repeat 3
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from coverbound import _kernels_py
from coverbound.oracle import Multigraph, search_tables

try:
    from coverbound import _kernels
except ImportError:
    _kernels = None

# (v, k, t, target): target is one below the exact covering number
COVER_CASES = [
    (8, 3, 2, 10),
    (7, 4, 3, 11),
    (8, 5, 3, 7),
    (8, 4, 2, 5),
    (9, 4, 2, 7),
]


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_cover(backends, repeat: int):
    rows = []
    for v, k, t, target in COVER_CASES:
        _, n_tsets, block_tsets, tset_blocks = search_tables(v, k, t)
        timings, nodes = {}, set()
        for name, mod in backends:
            def run(mod=mod):
                status, n, _ = mod.cover_search(n_tsets, block_tsets, tset_blocks, 1, target, 10 ** 9)
                nodes.add((status, n))
            timings[name] = best_time(run, repeat)
        if len(nodes) != 1:
            raise SystemExit(f"backends disagree on ({v},{k},{t}): {nodes}")
        (status, n), = nodes
        rows.append((f"cover ({v},{k},{t}) <= {target}", n, timings))
    return rows


def bench_independent(backends, repeat: int, n_graphs: int, seed: int):
    rng = random.Random(seed)
    graphs = [Multigraph.random(rng, max_vertices=12, max_mult=3) for _ in range(n_graphs)]
    timings, answers = {}, []
    for name, mod in backends:
        def run(mod=mod):
            out = [mod.max_n_independent(g.mu, n)[0] for g in graphs for n in range(1, 5)]
            answers.append(out)
        timings[name] = best_time(run, repeat)
    if any(a != answers[0] for a in answers):
        raise SystemExit("backends disagree on independence numbers")
    return [(f"independent x{n_graphs * 4}", None, timings)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--graphs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--skip-python", action="store_true", help="time only the compiled kernels")
    args = ap.parse_args(argv)

    backends = []
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)
    if not args.skip_python or _kernels is None:
        backends.append(("python", _kernels_py))

    rows = bench_cover(backends, args.repeat)
    rows += bench_independent(backends, args.repeat, args.graphs, args.seed)

    names = [name for name, _ in backends]
    header = f"{'case':<24}{'nodes':>10}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, nodes, timings in rows:
        line = f"{label:<24}{'' if nodes is None else nodes:>10}"
        line += "".join(f"{timings[n] * 1000:>10.1f}ms" for n in names)
        if len(names) == 2:
            line += f"{timings['python'] / timings['cython']:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
