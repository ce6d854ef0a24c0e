"""Compare the compiled and pure-Python kernels on the same workloads.

Each backend runs in its own interpreter (the backend is picked at import
time), so this script re-invokes itself with ``PHYLOCONSENSUS_PURE`` set or
unset and prints one TSV row per (backend, workload).

    python3 benchmarks/bench_backends.py [--n 256 512] [--k 8] [--seed 0]
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import time


def _workloads(n_values, k, seed):
    from phyloconsensus import dynforest, kernels
    from phyloconsensus.dynforest.oracle import fuzz_forest
    from phyloconsensus.engine import greedy_run
    from phyloconsensus.freqdiff import frequency_difference_consensus
    from phyloconsensus.generate import random_treeset

    rows = []
    for n in n_values:
        ts = random_treeset(k, n, random.Random(f"{seed}/{n}"))
        t0 = time.perf_counter()
        _, st = greedy_run(ts)
        rows.append(("greedy", n, time.perf_counter() - t0))
        rows.append(("greedy-phase", n, st.stats.timings["greedy"]))
        t0 = time.perf_counter()
        frequency_difference_consensus(ts)
        rows.append(("freqdiff", n, time.perf_counter() - t0))
    # raw splay kernel: random access-heavy lca queries on a random tree
    f = dynforest.DynForest()
    m = 20000
    rng = random.Random(seed)
    for i in range(m):
        f.make_node(True)
        if i:
            f.link(i, rng.randrange(i))
    t0 = time.perf_counter()
    for _ in range(100000):
        f.lca_raw(rng.randrange(m), rng.randrange(m))
    rows.append(("lca-1e5", m, time.perf_counter() - t0))
    return dynforest.BACKEND, kernels.BACKEND, rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(_workloads(args.n, args.k, args.seed)))
        return
    results = {}
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("PHYLOCONSENSUS_PURE", None)
        if pure:
            env["PHYLOCONSENSUS_PURE"] = "1"
        cmd = [sys.executable, __file__, "--child", "--k", str(args.k), "--seed", str(args.seed),
               "--n", *map(str, args.n)]
        out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True).stdout
        forest_backend, kernel_backend, rows = json.loads(out)
        results[pure] = rows
        for name, n, secs in rows:
            print(f"{forest_backend}/{kernel_backend}\t{name}\t{n}\t{secs:.4f}")
    if results[False] and results[True]:
        print("workload\tn\tspeedup")
        for (name, n, fast), (_, _, slow) in zip(results[False], results[True]):
            print(f"{name}\t{n}\t{slow / fast:.2f}x")


if __name__ == "__main__":
    main()
