import random

import pytest
from click.testing import CliRunner

from phyloconsensus.cli import load_treeset, main
from phyloconsensus.generate import random_treeset
from phyloconsensus.tree import write_newick


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, args, text=""):
    return runner.invoke(main, args, input=text)


def test_greedy_echo_single_tree(runner):
    res = run(runner, ["greedy"], "((3,(2,1)),4);\n")
    assert res.exit_code == 0 and res.stdout == "(((1,2),3),4);\n"


def test_greedy_majority(runner):
    res = run(runner, ["greedy"], "((1,2),3);\n((1,2),3);\n(1,(2,3));\n")
    assert res.exit_code == 0 and res.stdout == "((1,2),3);\n"


def test_freqdiff_examples(runner):
    assert run(runner, ["freqdiff"], "((1,2),3);\n(1,(2,3));\n").stdout == "(1,2,3);\n"
    assert run(runner, ["freqdiff"], "((1,2),3);\n(1,(2,3));\n((1,2),3);\n").stdout == "((1,2),3);\n"
    assert run(runner, ["freqdiff"], "((1,(2,3)),(4,5));\n").stdout == "((1,(2,3)),(4,5));\n"


def test_named_taxa_roundtrip(runner):
    res = run(runner, ["greedy"], "((cat,dog),cow);\n((dog,cat),cow);\n(cat,(dog,cow));\n")
    assert res.exit_code == 0 and res.stdout == "((cat,dog),cow);\n"


def test_parse_error_exit_2(runner, tmp_path):
    assert run(runner, ["greedy"], "((1,2),3\n").exit_code == 2
    assert run(runner, ["freqdiff"], "").exit_code == 2
    assert run(runner, ["greedy", str(tmp_path / "missing.nwk")]).exit_code == 2


def test_label_mismatch_exit_3(runner):
    res = run(runner, ["greedy"], "((1,2),3);\n((1,2),4);\n")
    assert res.exit_code == 3
    assert run(runner, ["freqdiff"], "((1,2),3);\n(1,2);\n").exit_code == 3


def test_load_treeset_numbering():
    ts, names = load_treeset("((10,2),7);\n(2,(7,10));\n")
    assert names is not None and [names.name(i) for i in (1, 2, 3)] == ["2", "7", "10"]
    ts, names = load_treeset("((1,2),3);\n")
    assert names is None and ts.n == 3


@pytest.mark.parametrize("cmd", ["greedy", "freqdiff"])
def test_fast_naive_identical(runner, cmd):
    rng = random.Random(51)
    for _ in range(100):
        ts = random_treeset(rng.randint(1, 6), rng.randint(2, 30), rng, correlated=rng.random() < 0.6)
        text = "".join(write_newick(t) + "\n" for t in ts)
        fast = run(runner, [cmd, "--algorithm", "fast"], text)
        naive = run(runner, [cmd, "--algorithm", "naive"], text)
        assert fast.exit_code == naive.exit_code == 0
        assert fast.stdout == naive.stdout


def test_deterministic_output(runner):
    ts = random_treeset(5, 40, random.Random(52))
    text = "".join(write_newick(t) + "\n" for t in ts)
    outs = {run(runner, ["greedy"], text).stdout for _ in range(3)}
    assert len(outs) == 1


def test_stats_on_stderr(runner):
    res = run(runner, ["greedy", "--stats"], "((1,2),3,4);\n(1,(2,3),4);\n")
    assert res.exit_code == 0 and res.stdout == "((1,2),3,4);\n"
    keys = dict(line.split("\t") for line in res.stderr.splitlines())
    assert {"credit", "lca_ext_calls", "max_query_calls", "n_log2_n", "backend"} <= set(keys)
    res = run(runner, ["freqdiff", "--stats"], "((1,2),3,4);\n")
    assert "time_filter" in res.stderr


def test_frequencies_tsv(runner):
    res = run(runner, ["frequencies", "--nontrivial"], "((1,2),3,4);\n((1,2),3,4);\n(1,(2,3),4);\n")
    rows = [line.split("\t") for line in res.stdout.splitlines()]
    assert rows[0] == ["id", "frequency", "size", "cluster"]
    assert sorted((r[3], r[1]) for r in rows[1:]) == [("1,2", "2"), ("2,3", "1")]
    heavy = run(runner, ["frequencies", "--method", "heavypath"], "((1,2),3);\n(1,(2,3));\n")
    fast = run(runner, ["frequencies"], "((1,2),3);\n(1,(2,3));\n")
    strip = lambda out: sorted(tuple(line.split("\t")[1:]) for line in out.splitlines()[1:])
    assert strip(heavy.stdout) == strip(fast.stdout)


def test_verify_zero_iterations(runner):
    res = run(runner, ["verify", "--seed", "1", "--iterations", "0"])
    assert res.exit_code == 0 and "0 checks" in res.stdout


def test_verify_passes(runner):
    res = run(runner, ["verify", "--seed", "3", "--iterations", "8", "--max-n", "20"])
    assert res.exit_code == 0, res.stdout + res.stderr
    assert "all agree" in res.stdout


def test_verify_mutation_detected(runner, tmp_path):
    ce = tmp_path / "ce.nwk"
    res = run(runner, ["verify", "--seed", "5", "--iterations", "40", "--mutate-tie-break",
                       "size-revlex", "--counterexample", str(ce)])
    assert res.exit_code == 1
    body = ce.read_text()
    assert "seed=5" in body
    trees = [line for line in body.splitlines() if line and not line.startswith("#")]
    # the minimised counterexample still reproduces through the plain CLI
    fast = run(runner, ["greedy", "--tie-break", "size-revlex"], "\n".join(trees) + "\n")
    naive = run(runner, ["greedy", "--algorithm", "naive"], "\n".join(trees) + "\n")
    assert fast.stdout != naive.stdout


def test_bench_rows(runner):
    res = run(runner, ["bench", "--seed", "1", "-n", "16", "-n", "32", "-k", "2", "-k", "3",
                       "--algorithm", "fast", "--algorithm", "freqdiff", "--repetitions", "2"])
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert lines[0].split("\t")[:3] == ["algorithm", "k", "n"]
    assert len(lines) - 1 == 2 * 2 * 2 * 2


def test_bench_naive_cutoff(runner):
    res = run(runner, ["bench", "--seed", "1", "-n", "8", "-n", "64", "--naive-max-n", "10"])
    rows = [line.split("\t") for line in res.stdout.splitlines()[1:]]
    assert ("naive", "64") not in {(r[0], r[2]) for r in rows}
    assert ("fast", "64") in {(r[0], r[2]) for r in rows}


def test_bench_requires_seed(runner):
    assert run(runner, ["bench"]).exit_code == 2
