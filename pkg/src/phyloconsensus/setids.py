"""Cluster identifiers: ``id(u) == id(u')`` iff ``L(u) == L(u')`` across all trees.

Two independent routes are provided:

* :func:`assign_ids_heavypath` grows one :class:`DynamicSetEquality` per
  heavy path (largest child's structure is reused, smaller children's leaves
  are inserted), ``O(kn log^3 n)``.
* :func:`assign_ids_fast` processes size levels ``2^l <= |L(v)| < 2^(l+1)``
  one phase at a time, identifying all prefix sets of the level paths with
  radix sorts instead of a dictionary, ``O(kn log^2 n)``.

Both return dense identifiers ``1..m`` where ``m`` is the number of distinct
clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels
from .table import ClusterEntry, ClusterTable
from .tree import PhyloTree, TreeSet


class SetIdContext:
    """State shared by all set-equality structures of one identifier run.

    Identifiers are allocated per height of the implicit complete binary tree
    ``B``: height-0 nodes (leaves) holding an element all get identifier 1,
    and an inner node's identifier is looked up from the pair of its
    children's identifiers.  The empty set is 0 at every height.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.height = max(1, (n - 1).bit_length())
        self.width = 1 << self.height
        self.pairs: dict[tuple[int, int, int], int] = {}
        self.next_id = [1] + [0] * self.height
        self.adds = 0

    def new(self) -> "DynamicSetEquality":
        return DynamicSetEquality(self)

    def max_identifier(self) -> int:
        return max(self.next_id)


class DynamicSetEquality:
    """A growing subset of ``[1, n]`` with an equality-revealing identifier."""

    __slots__ = ("ctx", "nodes", "elems")

    def __init__(self, ctx: SetIdContext):
        self.ctx = ctx
        self.nodes: dict[int, int] = {}   # heap index in B -> identifier
        self.elems: list[int] = []

    def add(self, x: int) -> None:
        ctx = self.ctx
        if not 1 <= x <= ctx.n:
            raise ValueError(f"element {x} outside 1..{ctx.n}")
        nodes = self.nodes
        idx = ctx.width + x - 1
        if idx in nodes:
            return
        ctx.adds += 1
        self.elems.append(x)
        nodes[idx] = 1
        pairs = ctx.pairs
        next_id = ctx.next_id
        h = 0
        while idx > 1:
            lid = nodes.get(idx & ~1, 0)
            rid = nodes.get(idx | 1, 0)
            idx >>= 1
            h += 1
            key = (h, lid, rid)
            ident = pairs.get(key)
            if ident is None:
                next_id[h] += 1
                ident = pairs[key] = next_id[h]
            nodes[idx] = ident

    def id(self) -> int:
        return self.nodes.get(1, 0)

    def list(self) -> list[int]:
        return list(self.elems)

    def __len__(self) -> int:
        return len(self.elems)


def dse_new(ctx: SetIdContext) -> DynamicSetEquality:
    return ctx.new()


@dataclass
class IdAssignment:
    """``ids[i][v]``: identifier of node ``v`` of tree ``i`` (dense, from 1)."""

    ids: list[list[int]]
    count: int
    stats: dict = field(default_factory=dict)

    def partition(self) -> list[list[tuple[int, int]]]:
        classes: dict[int, list[tuple[int, int]]] = {}
        for i, row in enumerate(self.ids):
            for v, x in enumerate(row):
                classes.setdefault(x, []).append((i, v))
        return sorted(classes.values())


def assign_ids_heavypath(ts: TreeSet) -> IdAssignment:
    ctx = SetIdContext(ts.n)
    dense: dict[int, int] = {}
    out = []
    for t in ts:
        sizes = t.subtree_sizes()
        row = [0] * len(t)
        holder: list[DynamicSetEquality | None] = [None] * len(t)
        for v in t.postorder():
            if t.label[v]:
                s = ctx.new()
                s.add(t.label[v])
            else:
                ch = t.children[v]
                big = max(ch, key=sizes.__getitem__)
                s = holder[big]
                for c in ch:
                    if c != big:
                        for x in holder[c].elems:
                            s.add(x)
                    holder[c] = None
            holder[v] = s
            raw = s.id()
            row[v] = dense.setdefault(raw, len(dense) + 1)
        out.append(row)
    return IdAssignment(out, len(dense), {"adds": ctx.adds, "max_raw_id": ctx.max_identifier()})


@dataclass
class LevelPath:
    """Maximal chain of same-level nodes ``v_1 (head) .. v_s`` in one tree."""

    tree: int
    nodes: list[int]
    sequence: list[int] = field(default_factory=list)   # leaf labels, prefix order
    prefix: list[int] = field(default_factory=list)     # |L(v_j)| for each node


def _leaf_order(t: PhyloTree) -> tuple[list[int], list[int]]:
    """Leaf labels in DFS order and the offset of each subtree in it."""
    order: list[int] = []
    first = [0] * len(t)
    label = t.label
    for v in t.preorder():
        first[v] = len(order)
        if label[v]:
            order.append(label[v])
    return order, first


def all_level_paths(t: PhyloTree, tree_index: int) -> dict[int, list[LevelPath]]:
    """Level paths of ``t`` for every phase, each with its prefix ordering.

    The sequence lists the leaves under the bottom node first, then the
    leaves each higher node adds, so every ``L(v_j)`` is a prefix.
    """
    sizes = t.subtree_sizes()
    levels = [s.bit_length() - 1 for s in sizes]
    order, first = _leaf_order(t)
    parent = t.parent
    children = t.children
    label = t.label
    out: dict[int, list[LevelPath]] = {}
    for v in range(len(t)):
        phase = levels[v]
        p = parent[v]
        if p != -1 and levels[p] == phase:
            continue
        chain = [v]
        while True:
            x = chain[-1]
            nxt = -1
            for c in children[x]:
                if levels[c] == phase:
                    nxt = c
                    break
            if nxt < 0:
                break
            chain.append(nxt)
        seq: list[int] = []
        below = -1
        for x in reversed(chain):
            if label[x]:
                seq.append(label[x])
            for c in children[x]:
                if c != below:
                    f = first[c]
                    seq.extend(order[f:f + sizes[c]])
            below = x
        out.setdefault(phase, []).append(
            LevelPath(tree_index, chain, seq, [sizes[x] for x in chain]))
    return out


def level_paths(t: PhyloTree, tree_index: int, phase: int) -> list[LevelPath]:
    return all_level_paths(t, tree_index).get(phase, [])


def assign_ids_fast(ts: TreeSet) -> IdAssignment:
    n = ts.n
    height = max(1, (n - 1).bit_length())
    per_tree = [all_level_paths(t, i) for i, t in enumerate(ts)]
    out = [[0] * len(t) for t in ts]
    offset = 0
    max_versions = 0
    for phase in range(n.bit_length()):
        paths: list[LevelPath] = []
        for lp in per_tree:
            paths.extend(lp.get(phase, ()))
        if not paths:
            continue
        pos: list[int] = []
        grp: list[int] = []
        start: list[int] = []
        for g, p in enumerate(paths):
            start.append(len(pos))
            pos.extend(x - 1 for x in p.sequence)
            grp.extend([g] * len(p.sequence))
        max_versions = max(max_versions, len(pos))
        if len(pos) > ts.k * n:
            raise AssertionError("more versions per depth than leaves in all trees")
        root_ids, distinct = kernels.propagate_versions(pos, grp, height)
        for g, p in enumerate(paths):
            row = out[p.tree]
            base = start[g] - 1
            for v, r in zip(p.nodes, p.prefix):
                row[v] = offset + root_ids[base + r]
        offset += distinct
    # prefixes that are not the cluster of any node got identifiers too;
    # renumber the used ones densely, keeping their order
    dense = [0] * (offset + 1)
    for row in out:
        for x in row:
            dense[x] = 1
    m = 0
    for x in range(1, offset + 1):
        if dense[x]:
            m += 1
            dense[x] = m
    out = [[dense[x] for x in row] for row in out]
    return IdAssignment(out, m, {"max_versions_per_depth": max_versions, "raw_identifiers": offset})


def count_frequencies(ts: TreeSet, ids: IdAssignment) -> ClusterTable:
    """Counting sort over identifiers; entries come out sorted by id."""
    count = [0] * (ids.count + 1)
    rep_tree = [-1] * (ids.count + 1)
    rep_node = [-1] * (ids.count + 1)
    for i, row in enumerate(ids.ids):
        for v, x in enumerate(row):
            if not count[x]:
                rep_tree[x] = i
                rep_node[x] = v
            count[x] += 1
    sizes = [t.subtree_sizes() for t in ts]
    entries = [ClusterEntry(x, count[x], sizes[rep_tree[x]][rep_node[x]], rep_tree[x], rep_node[x])
               for x in range(1, ids.count + 1) if count[x]]
    return ClusterTable(ts, entries, sorted_by_id=True)


def cluster_table(ts: TreeSet, method: str = "fast") -> ClusterTable:
    if method == "fast":
        ids = assign_ids_fast(ts)
    elif method == "heavypath":
        ids = assign_ids_heavypath(ts)
    else:
        raise ValueError(f"unknown identifier method {method!r}")
    return count_frequencies(ts, ids)
