import math
import random

import pytest

from phyloconsensus.dynforest import ANCESTOR, BACKEND, DynForest, EdgeRef, ForestError
from phyloconsensus.dynforest import _lct_py
from phyloconsensus.dynforest.oracle import NaiveForest, fuzz_forest


def star(k):
    f = DynForest()
    root = f.make_node(False)
    leaves = [f.make_node(True) for _ in range(k)]
    for x in leaves:
        f.link(x, root)
    return f, root, leaves


def test_make_node_counts():
    f = DynForest()
    a = f.make_node(True)
    b = f.make_node(False)
    assert f.count_leaves(a) == 1 and f.count_leaves(b) == 0
    assert not f.connected(a, b)
    assert f.lca(a, b) is None


def test_link_and_cut():
    f, root, leaves = star(3)
    assert f.count_leaves(root) == 3
    f.cut(leaves[0])
    assert f.count_leaves(root) == 2 and f.count_leaves(leaves[0]) == 1
    f.link(leaves[0], root)
    assert f.count_leaves(leaves[0]) == 3
    assert f.parent(leaves[0]) == root and f.parent(root) == -1


def test_link_errors():
    f, root, leaves = star(2)
    with pytest.raises(ForestError):
        f.link(leaves[0], leaves[1])          # not a root
    with pytest.raises(ForestError):
        f.link(root, leaves[0])               # cycle
    with pytest.raises(ForestError):
        f.cut(root)


def test_star_counts_everywhere():
    f, root, leaves = star(5)
    for v in [root] + leaves:
        assert f.count_leaves(v) == 5
    assert f.subtree_leaves(root) == 5
    assert all(f.subtree_leaves(x) == 1 for x in leaves)


def test_lca_chain():
    f = DynForest()
    a, b, c = (f.make_node(False) for _ in range(3))
    f.link(b, a)
    f.link(c, b)
    assert f.lca(b, c) == b
    assert f.lca(c, c) == c
    assert f.lca_ext(b, c) is ANCESTOR
    assert f.lca_ext(c, c) is ANCESTOR
    assert f.lca_ext(c, a) == EdgeRef(b)


def test_lca_ext_children():
    # v with children x (over leaf n) and y (over leaf k)
    f = DynForest()
    v, x, y, n, k = (f.make_node(i >= 3) for i in range(5))
    f.link(x, v)
    f.link(y, v)
    f.link(n, x)
    f.link(k, y)
    assert f.lca_ext(v, k) is ANCESTOR
    assert f.lca_ext(n, k) == EdgeRef(x)
    assert f.lca_ext(k, n) == EdgeRef(y)
    other = f.make_node(True)
    with pytest.raises(ForestError):
        f.lca_ext(n, other)


def test_queries_do_not_change_structure():
    rng = random.Random(3)
    f = DynForest()
    for i in range(200):
        f.make_node(rng.random() < 0.5)
        if i:
            f.link(i, rng.randrange(i))
    before = f.real_parents()
    for _ in range(500):
        u, v = rng.randrange(200), rng.randrange(200)
        f.subtree_leaves(u)
        f.lca_ext(u, v)
        f.lca(u, v)
    assert f.real_parents() == before
    f.audit()


@pytest.mark.parametrize("seed", range(5))
def test_fuzz_with_audits(seed):
    fail, fast = fuzz_forest(seed, 3000, 30, audit_every=50)
    assert fail is None, fail


def test_fuzz_bigger_pool():
    fail, _ = fuzz_forest(99, 5000, 120)
    assert fail is None, fail


def test_rotation_bound():
    rng = random.Random(11)
    n = 5000
    f = DynForest()
    for i in range(n):
        f.make_node(True)
        if i:
            f.link(i, rng.randrange(max(0, i - 3), i))   # long paths
    f.rotations = 0
    m = 20000
    for _ in range(m):
        f.lca(rng.randrange(n), rng.randrange(n))
    assert f.rotations <= 12 * m * math.log2(n)


def test_pure_backend_matches():
    rng = random.Random(5)
    a, b = DynForest(), _lct_py.LinkCutForestBase()
    for i in range(300):
        leaf = rng.random() < 0.5
        a.make_node(leaf)
        b.make_node(leaf)
        if i:
            p = rng.randrange(i)
            a.link(i, p)
            b.link(i, p)
    for _ in range(2000):
        u, v = rng.randrange(300), rng.randrange(300)
        assert a.lca_raw(u, v) == b.lca_raw(u, v)
        assert a.lca_ext_raw(u, v) == b.lca_ext_raw(u, v)
        assert a.subtree_leaves(u) == b.subtree_leaves(u)
    assert BACKEND in ("cython", "python")


def test_naive_forest_oracle_basics():
    f = NaiveForest()
    r, x, y = f.make_node(False), f.make_node(True), f.make_node(True)
    f.link(x, r)
    f.link(y, r)
    assert f.count_leaves(x) == 2 and f.lca(x, y) == r
    assert f.lca_ext(x, y) == EdgeRef(x)
    assert f.lca_ext(r, x) is ANCESTOR
