import random

import pytest

from phyloconsensus.generate import random_tree
from phyloconsensus.tree import (NewickError, PhyloTree, TaxonMap, TreeError, TreeSet, LabelSetMismatch,
                                 binarize, clusters_compatible, from_bits, isomorphic, parse_newick,
                                 read_newick_lines, relabel, restrict, signature, to_bits, write_newick)


def fs(*xs):
    return frozenset(xs)


def test_parse_star():
    t = parse_newick("(1,2,3);")
    assert len(t.children[t.root]) == 3
    assert t.n == 3


def test_parse_signature():
    t = parse_newick("((1,2),3);")
    assert signature(t) == {fs(1), fs(2), fs(3), fs(1, 2), fs(1, 2, 3)}


def test_branch_lengths_and_inner_names_dropped():
    t = parse_newick("((1:0.5,2:1e-3)x:2,3)root;")
    assert write_newick(t) == "((1,2),3);"


@pytest.mark.parametrize("text", [
    "((1,2),3)", "((1,2),3;", "(1,,2);", "(1,2));", "(1,1);", "(1,3);", "((1),2);",
    "(a,b);", "(0,1);", "(1,2);(1,2);", "1;", "",
])
def test_malformed(text):
    with pytest.raises(TreeError):
        parse_newick(text)


def test_parse_error_is_newick_error():
    with pytest.raises(NewickError):
        parse_newick("((1,2),3")


def test_canonical_order():
    assert write_newick(parse_newick("(3,(2,1));")) == "((1,2),3);"
    assert write_newick(parse_newick("(3,(2,1));"), canonical=False) == "(3,(2,1));"
    assert write_newick(PhyloTree.star(3)) == "(1,2,3);"


def test_round_trip_random():
    rng = random.Random(1)
    for _ in range(1000):
        t = random_tree(rng.randint(2, 30), rng, multifurcation=0.3)
        back = parse_newick(write_newick(t, canonical=False))
        assert isomorphic(t, back)
        assert write_newick(back) == write_newick(t)


def test_canonical_equal_for_isomorphic():
    rng = random.Random(2)
    for _ in range(200):
        t = random_tree(rng.randint(2, 20), rng)
        # shuffle child order
        children = [list(c) for c in t.children]
        for c in children:
            rng.shuffle(c)
        s = PhyloTree(list(t.parent), children, list(t.label), t.root)
        assert write_newick(s) == write_newick(t)


def test_signature_size_is_node_count():
    rng = random.Random(3)
    for _ in range(200):
        t = random_tree(rng.randint(2, 40), rng, multifurcation=0.5)
        assert len(signature(t)) == len(t)
        assert t.inner_count() <= t.n - 1
    assert signature(PhyloTree.star(4)) == {fs(1), fs(2), fs(3), fs(4), fs(1, 2, 3, 4)}


def test_compatible():
    assert clusters_compatible(fs(1, 2), fs(3, 4))
    assert clusters_compatible(fs(1, 2), fs(1, 2, 3))
    assert not clusters_compatible(fs(1, 2), fs(2, 3))
    assert not clusters_compatible(to_bits([1, 2]), to_bits([2, 3]))
    assert clusters_compatible(to_bits([1, 2, 3]), to_bits([2]))
    assert from_bits(to_bits([5, 1])) == fs(1, 5)


def test_same_tree_clusters_compatible():
    rng = random.Random(4)
    t = random_tree(30, rng)
    cl = t.clusters()
    for a in cl:
        for b in cl:
            assert clusters_compatible(a, b) == clusters_compatible(b, a) is True


def test_binarize_binary_unchanged():
    bt = binarize(parse_newick("(1,2);"))
    assert write_newick(bt.tree) == "(1,2);"


def test_binarize_star_chain():
    orig = parse_newick("(1,2,3,4);")
    bt = binarize(orig)
    assert bt.tree.inner_count() == 3
    assert all(len(c) in (0, 2) for c in bt.tree.children)
    assert bt.tree.cluster(bt.origin_map[orig.root]) == fs(1, 2, 3, 4)


def test_binarize_preserves_clusters():
    rng = random.Random(5)
    for _ in range(200):
        t = random_tree(rng.randint(2, 30), rng, multifurcation=0.6, max_degree=8)
        bt = binarize(t)
        for u in range(len(t)):
            assert bt.tree.cluster(bt.origin_map[u]) == t.cluster(u)
            assert bt.origin_of[bt.origin_map[u]] == u
        assert all(len(c) in (0, 2) for c in bt.tree.children)


def test_taxon_map_round_trip():
    names = TaxonMap()
    t = parse_newick("((cat,dog),mouse);", names)
    assert write_newick(t, names=names) == "((cat,dog),mouse);"
    assert len(names) == 3


def test_read_lines_skips_comments():
    trees = read_newick_lines(["# header", "", "((1,2),3);", "  (1,2,3);  "])
    assert len(trees) == 2


def test_read_lines_reports_line():
    with pytest.raises(NewickError, match="line 2"):
        read_newick_lines(["(1,2);", "(1,2"])


def test_treeset_mismatch():
    with pytest.raises(LabelSetMismatch):
        TreeSet([parse_newick("(1,2);"), parse_newick("(1,2,3);")])
    with pytest.raises(TreeError):
        TreeSet([])


def test_restrict_and_relabel():
    t = parse_newick("((1,2),(3,(4,5)));")
    assert write_newick(restrict(t, [1, 3, 5])) == "(1,(2,3));"
    assert write_newick(restrict(t, [4, 5])) == "(1,2);"
    assert write_newick(relabel(parse_newick("((1,2),3);"), [0, 3, 2, 1])) == "(1,(2,3));"
