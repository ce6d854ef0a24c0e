"""``phyloconsensus`` command line.

Exit codes: 0 success, 1 verify mismatch, 2 unreadable input, 3 trees over
different leaf sets.
"""

from __future__ import annotations

import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import dynforest, kernels, setids
from .dynforest.oracle import fuzz_forest
from .engine import greedy_run
from .freqdiff import frequency_difference_consensus
from .generate import adversarial_treeset, random_treeset
from .oracles import naive_frequencies, naive_frequency_difference, naive_greedy_consensus
from .table import TIE_BREAK_RULES
from .tree import TaxonMap, TreeError, TreeSet, parse_newick, relabel, restrict, write_newick

EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_LABELS = 3


class InputError(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def load_treeset(text: str) -> tuple[TreeSet, TaxonMap | None]:
    """Parse one tree per line and put all trees over a common ``1..n``.

    Integer taxa keep their numeric order; any other names are numbered in
    order of first appearance.  The returned map is ``None`` when taxa are
    already exactly ``1..n``.
    """
    parsed = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tm = TaxonMap()
        try:
            parsed.append((parse_newick(line, tm), tm))
        except TreeError as exc:
            raise InputError(f"line {lineno}: {exc}", EXIT_PARSE) from None
    if not parsed:
        raise InputError("no trees in input", EXIT_PARSE)
    first = parsed[0][1]
    ref = {first.name(i) for i in range(1, len(first) + 1)}
    for idx, (_, tm) in enumerate(parsed[1:], 1):
        got = {tm.name(i) for i in range(1, len(tm) + 1)}
        if got != ref:
            extra = sorted(got ^ ref)[:5]
            raise InputError(f"tree {idx} has a different leaf set (differs on {extra})",
                             EXIT_LABELS)
    ordered = [first.name(i) for i in range(1, len(first) + 1)]
    if all(s.isdigit() for s in ordered):
        ordered.sort(key=int)
    names = TaxonMap()
    for s in ordered:
        names.intern(s)
    trees = []
    for t, tm in parsed:
        mapping = [0] + [names.intern(tm.name(i)) for i in range(1, len(tm) + 1)]
        trees.append(relabel(t, mapping))
    plain = ordered == [str(i) for i in range(1, len(ordered) + 1)]
    return TreeSet(trees), (None if plain else names)


def _read_input(path: str) -> tuple[TreeSet, TaxonMap | None]:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc), EXIT_PARSE) from None
    return load_treeset(text)


def _emit_stats(rows: list[tuple[str, object]]) -> None:
    for key, val in rows:
        if isinstance(val, float):
            val = f"{val:.6f}"
        click.echo(f"{key}\t{val}", err=True)


def _workers() -> int:
    raw = os.environ.get("CONSENSUS_THREADS", "1")
    try:
        want = int(raw)
    except ValueError:
        raise click.UsageError(f"CONSENSUS_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(want, os.cpu_count() or 1))


@click.group()
@click.version_option(package_name="phyloconsensus")
def main() -> None:
    """Greedy and frequency difference consensus trees."""


algorithm_opt = click.option("--algorithm", type=click.Choice(["fast", "naive"]), default="fast",
                             show_default=True)
raw_opt = click.option("--raw", is_flag=True, help="Keep construction child order.")
stats_opt = click.option("--stats", is_flag=True, help="Write instrumentation TSV to stderr.")


@main.command()
@click.argument("input", default="-")
@algorithm_opt
@click.option("--tie-break", type=click.Choice(sorted(TIE_BREAK_RULES)), default="size-lex",
              show_default=True)
@click.option("--micro-size", type=click.IntRange(min=1), default=None,
              help="Micro tree size bound (default ceil(sqrt(n))).")
@stats_opt
@raw_opt
@click.option("--audit", is_flag=True, help="Recheck every engine invariant after each step.")
def greedy(input, algorithm, tie_break, micro_size, stats, raw, audit):
    """Greedy consensus of the trees in INPUT (one Newick tree per line)."""
    ts, names = _read_input(input)
    t0 = time.perf_counter()
    if algorithm == "naive":
        tree = naive_greedy_consensus(ts, tie_break)
        rows = [("algorithm", "naive"), ("n", ts.n), ("k", ts.k),
                ("time_total", time.perf_counter() - t0)]
    else:
        tree, st = greedy_run(ts, tie_break, b=micro_size, audit=audit)
        s = st.stats
        rows = [("algorithm", "fast"), ("n", ts.n), ("k", ts.k), ("micro_size", st.b),
                ("boundary_nodes", st.boundary_count),
                ("credit", s.credit), ("n_log2_n", s.credit_bound(ts.n)),
                ("lca_calls", s.lca_calls), ("lca_ext_calls", s.lca_ext_calls),
                ("max_query_calls", s.max_query_calls), ("queries", s.queries),
                ("accepted", s.accepted), ("reconnections", s.reconnections),
                ("method1", s.method1), ("method2", s.method2)]
        rows += [(f"time_{k}", v) for k, v in s.timings.items()]
        rows.append(("backend", dynforest.BACKEND))
    click.echo(write_newick(tree, canonical=not raw, names=names))
    if stats:
        _emit_stats(rows)


@main.command()
@click.argument("input", default="-")
@algorithm_opt
@stats_opt
@raw_opt
def freqdiff(input, algorithm, stats, raw):
    """Frequency difference consensus of the trees in INPUT."""
    ts, names = _read_input(input)
    t0 = time.perf_counter()
    rows: list = [("algorithm", algorithm), ("n", ts.n), ("k", ts.k)]
    if algorithm == "naive":
        tree = naive_frequency_difference(ts)
        rows.append(("time_total", time.perf_counter() - t0))
    else:
        timings: dict = {}
        tree = frequency_difference_consensus(ts, timings=timings)
        rows += [(f"time_{k}", v) for k, v in timings.items()]
        rows.append(("backend", kernels.BACKEND))
    click.echo(write_newick(tree, canonical=not raw, names=names))
    if stats:
        _emit_stats(rows)


@main.command()
@click.argument("input", default="-")
@click.option("--method", type=click.Choice(["fast", "heavypath"]), default="fast",
              show_default=True, help="Identifier assignment route.")
@click.option("--nontrivial", is_flag=True, help="Skip singletons and the full leaf set.")
def frequencies(input, method, nontrivial):
    """Distinct clusters of INPUT with their frequencies, as TSV."""
    ts, names = _read_input(input)
    table = setids.cluster_table(ts, method)
    entries = table.nontrivial() if nontrivial else list(table)
    fmt = names.name if names else str
    click.echo("id\tfrequency\tsize\tcluster")
    for e in entries:
        click.echo(f"{e.id}\t{e.frequency}\t{e.size}\t" + ",".join(fmt(x) for x in table.labels(e)))


# -- verify ------------------------------------------------------------------

def _greedy_case(ts, rule):
    return (write_newick(greedy_run(ts, rule)[0]), write_newick(naive_greedy_consensus(ts)))


def _freqdiff_case(ts, rule):
    return (write_newick(frequency_difference_consensus(ts)),
            write_newick(naive_frequency_difference(ts)))


def _ids_case(ts, rule):
    fast = setids.assign_ids_fast(ts).partition()
    slow = setids.assign_ids_heavypath(ts).partition()
    by_set: dict = {}
    for i, t in enumerate(ts):
        for v, c in enumerate(t.clusters()):
            by_set.setdefault(c, []).append((i, v))
    truth = sorted(by_set.values())
    return ((fast == truth, slow == truth), (True, True))


def _freq_case(ts, rule):
    return (setids.cluster_table(ts).as_dict(), naive_frequencies(ts).as_dict())


TREE_CHECKS = {"ids": _ids_case, "frequencies": _freq_case,
               "greedy": _greedy_case, "freqdiff": _freqdiff_case}


def _case_instance(seed: int, i: int, max_n: int, max_k: int) -> TreeSet:
    rng = random.Random(f"{seed}/{i}")
    n = rng.randint(2, max_n)
    k = rng.randint(1, max_k)
    if rng.random() < 0.1:
        return adversarial_treeset(k, max(n, 3), rng, rng.choice(["caterpillar", "star"]))
    return random_treeset(k, n, rng, correlated=rng.random() < 0.7,
                          multifurcation=rng.choice([0.0, 0.2, 0.6]))


def _fuzz_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def _verify_one(args):
    seed, i, max_n, max_k, fuzz_ops, rule = args
    ts = _case_instance(seed, i, max_n, max_k)
    out = []
    for name, fn in TREE_CHECKS.items():
        got, want = fn(ts, rule)
        out.append((name, got == want))
    if fuzz_ops:
        fail, _ = fuzz_forest(_fuzz_seed(seed, i), fuzz_ops, 24)
        out.append(("dynforest", fail is None))
    return i, out


def _minimize(ts: TreeSet, fails) -> TreeSet:
    """Drop trees, then leaves, as long as the failure persists."""
    trees = list(ts.trees)
    i = 0
    while i < len(trees) and len(trees) > 1:
        cand = TreeSet(trees[:i] + trees[i + 1:])
        if fails(cand):
            trees = cand.trees
        else:
            i += 1
    cur = TreeSet(trees)
    x = cur.n
    while x >= 1 and cur.n > 2:
        keep = [y for y in range(1, cur.n + 1) if y != x]
        cand = TreeSet(restrict(t, keep) for t in cur)
        if fails(cand):
            cur = cand
            x = min(x, cur.n)
        else:
            x -= 1
    return cur


def _write_counterexample(path: str, header: list[str], trees: TreeSet | None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        if trees is not None:
            for t in trees:
                fh.write(write_newick(t) + "\n")


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--iterations", type=click.IntRange(min=0), default=50, show_default=True)
@click.option("--max-n", type=click.IntRange(min=2), default=32, show_default=True)
@click.option("--max-k", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--fuzz-ops", type=click.IntRange(min=0), default=500, show_default=True,
              help="Dynamic forest fuzz operations per iteration.")
@click.option("--mutate-tie-break", type=click.Choice(sorted(TIE_BREAK_RULES)), default=None,
              help="Run the fast greedy path with a different rule (mutation test).")
@click.option("--counterexample", "ce_path", default="counterexample.nwk", show_default=True)
def verify(seed, iterations, max_n, max_k, fuzz_ops, mutate_tie_break, ce_path):
    """Differential check of every fast path against its naive oracle."""
    rule = mutate_tie_break
    jobs = [(seed, i, max_n, max_k, fuzz_ops, rule) for i in range(iterations)]
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_one, jobs))
    else:
        results = [_verify_one(j) for j in jobs]
    checks = 0
    counts: dict[str, int] = {}
    for i, out in results:
        for name, ok in out:
            checks += 1
            counts[name] = counts.get(name, 0) + 1
            if ok:
                continue
            header = [f"check={name} seed={seed} iteration={i}",
                      f"max_n={max_n} max_k={max_k} fuzz_ops={fuzz_ops}"]
            if name == "dynforest":
                fail, _ = fuzz_forest(_fuzz_seed(seed, i), fuzz_ops, 24,
                                                       keep_log=True)
                header.append(f"fuzz seed={fail.seed} step={fail.step} op={fail.op} "
                              f"got={fail.got} want={fail.want}")
                header += [f"op {op}" for op in fail.log]
                _write_counterexample(ce_path, header, None)
            else:
                fn = TREE_CHECKS[name]

                def fails(cand, fn=fn):
                    got, want = fn(cand, rule)
                    return got != want

                small = _minimize(_case_instance(seed, i, max_n, max_k), fails)
                got, want = fn(small, rule)
                header.append(f"fast: {got}")
                header.append(f"naive: {want}")
                _write_counterexample(ce_path, header, small)
            click.echo(f"MISMATCH in {name} at iteration {i} (seed {seed}); "
                       f"counterexample written to {ce_path}", err=True)
            click.echo(f"{checks} checks, 1 failed")
            sys.exit(EXIT_MISMATCH)
    detail = ", ".join(f"{k}={v}" for k, v in counts.items())
    click.echo(f"{checks} checks" + (f" ({detail})" if detail else "") + ", all agree")


# -- bench -------------------------------------------------------------------

BENCH_ALGORITHMS = ("fast", "naive", "freqdiff", "freqdiff-naive")


def _bench_one(args):
    algorithm, k, n, rep, seed, micro = args
    ts = random_treeset(k, n, random.Random(f"{seed}/{k}/{n}/{rep}"))
    credit = lca_ext = ""
    t0 = time.perf_counter()
    if algorithm == "fast":
        _, st = greedy_run(ts, b=micro)
        credit, lca_ext = st.stats.credit, st.stats.lca_ext_calls
    elif algorithm == "naive":
        naive_greedy_consensus(ts)
    elif algorithm == "freqdiff":
        frequency_difference_consensus(ts)
    else:
        naive_frequency_difference(ts)
    return (algorithm, k, n, rep, time.perf_counter() - t0, credit, lca_ext)


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("-n", "--n", "sizes", type=click.IntRange(min=2), multiple=True,
              default=(256, 512, 1024), show_default=True)
@click.option("-k", "--k", "ks", type=click.IntRange(min=1), multiple=True, default=(8,),
              show_default=True)
@click.option("--algorithm", "algorithms", type=click.Choice(BENCH_ALGORITHMS), multiple=True,
              default=("fast", "naive"), show_default=True)
@click.option("--repetitions", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--naive-max-n", type=click.IntRange(min=2), default=None,
              help="Skip naive algorithms above this n.")
@click.option("--micro-size", type=click.IntRange(min=1), default=None)
def bench(seed, sizes, ks, algorithms, repetitions, naive_max_n, micro_size):
    """Time the algorithms over a grid of random instances (TSV on stdout)."""
    jobs = []
    for alg in algorithms:
        for k in ks:
            for n in sizes:
                if naive_max_n is not None and alg.endswith("naive") and n > naive_max_n:
                    continue
                for rep in range(repetitions):
                    jobs.append((alg, k, n, rep, seed, micro_size))
    click.echo("algorithm\tk\tn\trep\tseconds\tcredit\tlca_ext\tn_log2_n")
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = pool.map(_bench_one, jobs)
            for row in rows:
                _bench_row(row)
    else:
        for job in jobs:
            _bench_row(_bench_one(job))


def _bench_row(row) -> None:
    alg, k, n, rep, secs, credit, lca_ext = row
    bound = f"{n * math.log2(n):.1f}" if alg == "fast" else ""
    click.echo(f"{alg}\t{k}\t{n}\t{rep}\t{secs:.6f}\t{credit}\t{lca_ext}\t{bound}")


if __name__ == "__main__":
    main()
