"""Frequency difference consensus.

Frequencies come from the fast identifier pass; the frequent clusters are
then picked out by a plain pairwise scan over bitsets and assembled by
nesting.
"""

from __future__ import annotations

import time

from . import kernels, setids
from .oracles import IncompatibleCluster
from .table import ClusterEntry, ClusterTable
from .tree import PhyloTree, TreeSet, to_bits


class FrequentSet:
    """The frequent entries of a table together with their bitsets."""

    def __init__(self, table: ClusterTable, entries: list[ClusterEntry], bits: list[int]):
        self.table = table
        self.entries = entries
        self.bits = bits

    def __len__(self) -> int:
        return len(self.entries)

    def clusters(self) -> set[frozenset]:
        return {self.table.cluster(e) for e in self.entries}


def frequent_clusters(table: ClusterTable) -> FrequentSet:
    n = table.ts.n
    entries = list(table.entries)
    bits = [to_bits(table.labels(e)) for e in entries]
    flags = kernels.frequent_flags(bits, [e.frequency for e in entries])
    pick = [i for i, ok in enumerate(flags) if ok]
    fs = FrequentSet(table, [entries[i] for i in pick], [bits[i] for i in pick])
    full = (1 << (n + 1)) - 2
    if full not in fs.bits and n > 1:
        raise AssertionError("the full leaf set must always be frequent")
    return fs


def build_tree_from_clusters(clusters, n: int) -> PhyloTree:
    """Assemble the tree whose clusters are exactly ``clusters`` (plus trivial ones).

    ``clusters`` is an iterable of label collections or leaf bitsets.  Each
    cluster is hung below the smallest already placed cluster containing
    it; a cluster that straddles two placed ones is reported as an error.
    """
    cl = []
    for c in clusters:
        b = c if isinstance(c, int) else to_bits(c)
        size = b.bit_count()
        if 1 < size < n:
            cl.append((size, b))
    cl = sorted(set(cl), key=lambda t: (-t[0], t[1]))
    children: list[list[int]] = [[]]
    label = [0]
    host = [0] * (n + 1)      # deepest placed node containing each leaf
    for _, b in cl:
        members = []
        m = b
        while m:
            low = m & -m
            members.append(low.bit_length() - 1)
            m ^= low
        if members[-1] > n:
            raise ValueError(f"cluster mentions leaf {members[-1]} > n={n}")
        par = host[members[0]]
        for x in members:
            if host[x] != par:
                raise IncompatibleCluster("cluster family is not pairwise compatible")
        v = len(children)
        children.append([])
        label.append(0)
        children[par].append(v)
        for x in members:
            host[x] = v
    for x in range(1, n + 1):
        v = len(children)
        children.append([])
        label.append(x)
        children[host[x]].append(v)
    # an inner node whose children all moved into one subcluster would be a
    # duplicate, which the dedup above rules out
    return PhyloTree.from_children(children, label)


def frequency_difference_consensus(ts: TreeSet, *, timings: dict | None = None) -> PhyloTree:
    t0 = time.perf_counter()
    table = setids.count_frequencies(ts, setids.assign_ids_fast(ts))
    t1 = time.perf_counter()
    fs = frequent_clusters(table)
    t2 = time.perf_counter()
    tree = build_tree_from_clusters(fs.bits, ts.n)
    if timings is not None:
        timings.update(frequencies=t1 - t0, filter=t2 - t1, assemble=time.perf_counter() - t2)
    return tree
