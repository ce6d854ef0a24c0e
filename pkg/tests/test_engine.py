import math
import random

import pytest

from phyloconsensus.engine import (CASE_ANCESTOR, CASE_FINGER, CASE_SMALL, EMPTY, FULL, MIXED,
                                   IncompatibleVerdict, StaleVerdict, add_cluster, check_compatible,
                                   greedy_consensus, greedy_run, init_state, retrieve_reconnect_sets)
from phyloconsensus.generate import adversarial_treeset, random_treeset
from phyloconsensus.oracles import TrivialCluster, naive_greedy_consensus, naive_is_compatible
from phyloconsensus.tree import isomorphic, parse_newick, signature, write_newick

from conftest import ts_of


def node_with(t, labels):
    labels = set(labels)
    return next(v for v in range(len(t)) if set(t.leaves(v)) == labels)


def test_init_state_star():
    ts = ts_of("(((1,2),3),(4,(5,6)));", "((1,2),(3,4),(5,6));")
    st = init_state(ts)
    assert signature(st.to_tree()) == signature(parse_newick("(1,2,3,4,5,6);"))
    st.audit()
    for bw in range(st.boundary_count):
        lw = st.b_size[bw]
        if lw == 1:
            assert st.finger[bw] != st.root
            continue
        assert st.finger[bw] == st.root
        assert st.groups.total(bw, FULL) == lw
        assert st.groups.total(bw, EMPTY) == ts.n - lw
        assert st.groups.count(bw, MIXED) == 0
    assert st.boundary_count <= sum(2 * len(mm.micros) for mm in st.decomp)


def test_star_any_cluster_compatible():
    ts = ts_of("((1,2),((3,4),5),6);")
    st = init_state(ts, b=2)
    for u in range(len(ts[0])):
        size = ts[0].subtree_sizes()[u]
        if 1 < size < ts.n:
            vd = check_compatible(st, 0, u)
            assert vd.compatible and vd.v == st.root


def test_star_add_pair_moves_finger():
    ts = ts_of("((1,2),3,4);")
    st = init_state(ts, b=1)
    u = node_with(ts[0], {1, 2})
    vd = check_compatible(st, 0, u)
    assert vd.compatible
    assert sorted(retrieve_reconnect_sets(st, vd, "reconnect")) == [1, 2]
    assert sorted(retrieve_reconnect_sets(st, vd, "remain")) == [3, 4]
    new = add_cluster(st, vd)
    assert write_newick(st.to_tree()) == "((1,2),3,4);"
    bw = st.bindex[0][st.decomp[0].bt.origin_map[u]]
    assert st.finger[bw] == new
    assert sorted(st.groups.members(bw, FULL)) == [1, 2]
    assert st.groups.members(bw, EMPTY) == st.groups.members(bw, MIXED) == []
    st.audit()


def test_method_two_for_large_reconnect():
    # C has 9 children, C_r has 5 of them, so the complement (4) is the side that moves
    ts = ts_of("((1,2,3,4,5),6,7,8,9);")
    st = init_state(ts)
    vd = check_compatible(st, 0, node_with(ts[0], {1, 2, 3, 4, 5}))
    assert (vd.reconnect, vd.remain) == (5, 4)
    add_cluster(st, vd)
    assert st.stats.method2 == 1 and st.stats.credit == 4
    assert write_newick(st.to_tree()) == "((1,2,3,4,5),6,7,8,9);"
    st.audit()


def test_incompatible_and_stale_verdicts():
    ts = ts_of("((1,2),3,4);", "(1,(2,3),4);")
    st = init_state(ts)
    v12 = check_compatible(st, 0, node_with(ts[0], {1, 2}))
    v23 = check_compatible(st, 1, node_with(ts[1], {2, 3}))
    add_cluster(st, v12)
    with pytest.raises(StaleVerdict):
        add_cluster(st, v23)
    fresh = check_compatible(st, 1, node_with(ts[1], {2, 3}))
    assert not fresh.compatible
    with pytest.raises(IncompatibleVerdict):
        add_cluster(st, fresh)
    with pytest.raises(TrivialCluster):
        check_compatible(st, 0, ts[0].root)
    with pytest.raises(TrivialCluster):
        check_compatible(st, 0, ts[0].leaf_node(1))
    assert not st._counter


def test_cases_are_exercised():
    rng = random.Random(21)
    seen = set()
    for _ in range(30):
        ts = random_treeset(4, 40, rng)
        st = init_state(ts)
        for i, t in enumerate(ts):
            for u in range(len(t)):
                if 1 < t.subtree_sizes()[u] < ts.n:
                    vd = check_compatible(st, i, u)
                    seen.add(vd.case)
                    if vd.compatible and rng.random() < 0.3 and t.cluster(u) not in signature(st.to_tree()):
                        add_cluster(st, vd)
    assert seen == {CASE_ANCESTOR, CASE_FINGER, CASE_SMALL}


def test_check_matches_naive_over_runs():
    """Random interleavings of queries and adds against the oracle."""
    rng = random.Random(22)
    pairs = 0
    while pairs < 20000:
        ts = random_treeset(rng.randint(2, 6), rng.randint(4, 40), rng, correlated=rng.random() < 0.5)
        st = init_state(ts, b=rng.choice([None, 1, 2, 4]))
        nodes = [(i, u) for i, t in enumerate(ts) for u in range(len(t)) if 1 < t.subtree_sizes()[u] < ts.n]
        rng.shuffle(nodes)
        for i, u in nodes:
            tc = st.to_tree()
            vd = check_compatible(st, i, u)
            pairs += 1
            assert vd.compatible == naive_is_compatible(tc, ts[i].cluster(u))
            if vd.compatible and ts[i].cluster(u) not in signature(tc):
                cr = retrieve_reconnect_sets(st, vd, "reconnect")
                rest = retrieve_reconnect_sets(st, vd, "remain")
                assert sorted(cr + rest) == sorted(st.children[vd.v])
                assert len(cr) == vd.reconnect and len(rest) == vd.remain
                if rng.random() < 0.5:
                    add_cluster(st, vd)
        st.audit()


def test_greedy_examples():
    t = "((1,(2,3)),((4,5),6));"
    assert isomorphic(greedy_consensus(ts_of(t)), parse_newick(t))
    assert write_newick(greedy_consensus(ts_of("((1,2),3);", "((1,2),3);", "(1,(2,3));"))) == "((1,2),3);"
    assert write_newick(greedy_consensus(ts_of("((1,2),3,4);", "(1,(2,3),4);"))) == "((1,2),3,4);"
    assert write_newick(greedy_consensus(ts_of("(1,2);", "(2,1);"))) == "(1,2);"


@pytest.mark.parametrize("rule", ["size-lex", "lex", "small-lex", "size-revlex"])
def test_greedy_differential(rule):
    rng = random.Random(hash(rule) & 0xFFFF)
    for it in range(80):
        ts = random_treeset(rng.randint(1, 8), rng.randint(2, 40), rng, correlated=rng.random() < 0.7)
        tree, st = greedy_run(ts, rule, audit=it < 20, b=rng.choice([None, None, 1, 3]))
        assert write_newick(tree) == write_newick(naive_greedy_consensus(ts, rule))
        assert st.stats.credit <= ts.n * math.log2(ts.n)


@pytest.mark.parametrize("kind", ["caterpillar", "star"])
def test_greedy_adversarial(kind):
    rng = random.Random(31)
    for _ in range(15):
        ts = adversarial_treeset(rng.randint(2, 8), rng.randint(3, 60), rng, kind)
        tree, st = greedy_run(ts, audit=True)
        assert write_newick(tree) == write_newick(naive_greedy_consensus(ts))


def test_query_budget_instrumented():
    rng = random.Random(32)
    for _ in range(30):
        ts = random_treeset(6, rng.randint(2, 100), rng)
        _, st = greedy_run(ts)
        assert st.stats.max_query_calls <= 2 * (math.isqrt(ts.n - 1) + 1 + 1) if ts.n > 1 else True
