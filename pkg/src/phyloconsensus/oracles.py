"""Brute-force reference implementations.

Every function here works directly from explicit label sets and is kept
deliberately simple; the fast modules are tested for agreement against them.
"""

from __future__ import annotations

from .table import ClusterEntry, ClusterTable, TieBreakRule, get_rule
from .tree import Cluster, PhyloTree, TreeError, TreeSet, clusters_compatible


class ClusterError(TreeError):
    """A cluster cannot be added to a tree."""


class IncompatibleCluster(ClusterError):
    pass


class DuplicateCluster(ClusterError):
    pass


class TrivialCluster(ClusterError):
    pass


def naive_frequencies(ts: TreeSet) -> ClusterTable:
    """Count every cluster by hashing its explicit label set."""
    index: dict[Cluster, ClusterEntry] = {}
    for i, t in enumerate(ts):
        for v, c in enumerate(t.clusters()):
            e = index.get(c)
            if e is None:
                index[c] = ClusterEntry(len(index) + 1, 1, len(c), i, v)
            else:
                e.frequency += 1
    return ClusterTable(ts, list(index.values()))


def _insertion_point(tc: PhyloTree, s: Cluster) -> tuple[int, list[int], bool]:
    """Scan all of ``tc`` once; return (lca of s, children of it inside s, ok).

    ``ok`` is the compatibility criterion: every child of the lca is either
    disjoint from ``s`` or contained in it.
    """
    label = tc.label
    children = tc.children
    hits = [0] * len(tc)
    size = [0] * len(tc)
    target = len(s)
    lca = -1
    for v in tc.postorder():
        if label[v]:
            size[v] = 1
            hits[v] = 1 if label[v] in s else 0
        else:
            h = z = 0
            for c in children[v]:
                h += hits[c]
                z += size[c]
            hits[v] = h
            size[v] = z
        if lca < 0 and hits[v] == target:
            lca = v
    inside = []
    ok = True
    for c in children[lca]:
        if hits[c] == size[c]:
            inside.append(c)
        elif hits[c]:
            ok = False
    return lca, inside, ok


def naive_is_compatible(tc: PhyloTree, s) -> bool:
    s = frozenset(s)
    if not s:
        raise ValueError("empty cluster")
    _, _, ok = _insertion_point(tc, s)
    return ok


def naive_add_cluster(tc: PhyloTree, s, *, in_place: bool = False) -> PhyloTree:
    """Insert ``s`` as a new node below the lca of its leaves."""
    s = frozenset(s)
    if len(s) <= 1 or len(s) >= tc.n:
        raise TrivialCluster(f"cluster of size {len(s)} is trivial for n={tc.n}")
    v, inside, ok = _insertion_point(tc, s)
    if not ok:
        raise IncompatibleCluster(f"{sorted(s)} conflicts with the tree")
    if len(inside) == len(tc.children[v]):
        raise DuplicateCluster(f"{sorted(s)} is already in the tree")
    if not in_place:
        tc = PhyloTree(list(tc.parent), [list(c) for c in tc.children],
                       list(tc.label), tc.root, validate=False)
    w = len(tc.parent)
    moved = set(inside)
    tc.children[v] = [c for c in tc.children[v] if c not in moved] + [w]
    tc.parent.append(v)
    tc.children.append(inside)
    tc.label.append(0)
    for c in inside:
        tc.parent[c] = w
    tc._sizes = None
    return tc


def naive_greedy_consensus(ts: TreeSet, tie_break: TieBreakRule | str | None = None) -> PhyloTree:
    rule = get_rule(tie_break)
    n = ts.n
    freq = naive_frequencies(ts).as_dict()
    order = rule.order([c for c in freq if 1 < len(c) < n],
                       freq.__getitem__, len, lambda c: tuple(sorted(c)))
    tc = PhyloTree.star(n)
    for c in order:
        v, inside, ok = _insertion_point(tc, c)
        if ok:
            naive_add_cluster(tc, c, in_place=True)
    return tc


def naive_frequent_clusters(ts: TreeSet) -> set[Cluster]:
    """Clusters that beat every cluster incompatible with them (pairwise scan)."""
    freq = naive_frequencies(ts).as_dict()
    items = list(freq.items())
    out = set()
    for a, fa in items:
        if all(fa > fb for b, fb in items if not clusters_compatible(a, b)):
            out.add(a)
    return out


def naive_frequency_difference(ts: TreeSet) -> PhyloTree:
    n = ts.n
    frequent = naive_frequent_clusters(ts)
    tc = PhyloTree.star(n)
    for c in sorted((c for c in frequent if 1 < len(c) < n), key=len, reverse=True):
        naive_add_cluster(tc, c, in_place=True)
    return tc
