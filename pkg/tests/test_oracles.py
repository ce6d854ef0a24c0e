import random

import pytest

from phyloconsensus.generate import random_tree, random_treeset
from phyloconsensus.oracles import (DuplicateCluster, IncompatibleCluster, TrivialCluster,
                                    naive_add_cluster, naive_frequencies, naive_frequency_difference,
                                    naive_frequent_clusters, naive_greedy_consensus,
                                    naive_is_compatible)
from phyloconsensus.tree import PhyloTree, clusters_compatible, isomorphic, parse_newick, signature, write_newick

from conftest import ts_of


def fs(*xs):
    return frozenset(xs)


def test_naive_frequencies_identical_trees():
    t = "((1,2),(3,4));"
    table = naive_frequencies(ts_of(t, t, t))
    assert set(table.as_dict().values()) == {3}


def test_naive_frequencies_two_trees():
    freq = naive_frequencies(ts_of("((1,2),3);", "(1,(2,3));")).as_dict()
    assert freq[fs(1, 2)] == 1 and freq[fs(2, 3)] == 1
    assert freq[fs(1, 2, 3)] == 2
    assert all(freq[fs(x)] == 2 for x in (1, 2, 3))


def test_naive_is_compatible():
    assert naive_is_compatible(PhyloTree.star(5), {2, 4})
    assert not naive_is_compatible(parse_newick("((1,2),3,4);"), {2, 3})
    assert naive_is_compatible(parse_newick("((1,2),3,4);"), {1, 2, 3})


def test_naive_add_cluster():
    out = naive_add_cluster(PhyloTree.star(4), {1, 2})
    assert write_newick(out) == "((1,2),3,4);"
    with pytest.raises(IncompatibleCluster):
        naive_add_cluster(out, {2, 3})
    with pytest.raises(DuplicateCluster):
        naive_add_cluster(out, {1, 2})
    with pytest.raises(TrivialCluster):
        naive_add_cluster(out, {1})
    with pytest.raises(TrivialCluster):
        naive_add_cluster(out, {1, 2, 3, 4})


def test_naive_add_groups_covered_children():
    # a five element cluster over a tree whose lca children are partly covered
    tc = parse_newick("((1,2),(3,4),5,(6,7),8,9);")
    out = naive_add_cluster(tc, {1, 2, 6, 7, 8})
    assert write_newick(out) == "(((1,2),(6,7),8),(3,4),5,9);"


def test_naive_add_signature_growth():
    rng = random.Random(7)
    done = 0
    while done < 200:
        n = rng.randint(4, 20)
        tc = random_tree(n, rng, multifurcation=0.6)
        s = frozenset(rng.sample(range(1, n + 1), rng.randint(2, n - 1)))
        if s in signature(tc) or not naive_is_compatible(tc, s):
            continue
        assert signature(naive_add_cluster(tc, s)) == signature(tc) | {s}
        done += 1


def test_greedy_examples():
    t = parse_newick("((1,(2,3)),(4,5));")
    assert isomorphic(naive_greedy_consensus(ts_of("((1,(2,3)),(4,5));")), t)
    assert write_newick(naive_greedy_consensus(ts_of("((1,2),3);", "((1,2),3);", "(1,(2,3));"))) == "((1,2),3);"
    assert write_newick(naive_greedy_consensus(ts_of("((1,2),3,4);", "(1,(2,3),4);"))) == "((1,2),3,4);"


def test_freqdiff_examples():
    t = "((1,(2,3)),(4,5));"
    assert write_newick(naive_frequency_difference(ts_of(t))) == write_newick(parse_newick(t))
    assert write_newick(naive_frequency_difference(ts_of("((1,2),3);", "(1,(2,3));"))) == "(1,2,3);"
    assert write_newick(naive_frequency_difference(ts_of("((1,2),3);", "((1,2),3);", "(1,(2,3));"))) == "((1,2),3);"


def test_greedy_output_is_consistent():
    rng = random.Random(8)
    for _ in range(50):
        ts = random_treeset(rng.randint(1, 6), rng.randint(2, 20), rng)
        sig = signature(naive_greedy_consensus(ts))
        assert all(fs(x) in sig for x in range(1, ts.n + 1))
        assert frozenset(range(1, ts.n + 1)) in sig
        assert all(clusters_compatible(a, b) for a in sig for b in sig)


def test_freqdiff_signature_is_frequent_set():
    rng = random.Random(9)
    for _ in range(50):
        ts = random_treeset(rng.randint(1, 6), rng.randint(2, 20), rng)
        assert signature(naive_frequency_difference(ts)) == naive_frequent_clusters(ts)
