"""Greedy consensus on top of a link/cut representation of the current tree.

The current consensus tree ``T_c`` lives in a :class:`DynForest` plus a
parallel child/parent index.  For every boundary node ``w`` of the
micro-macro decompositions of the binarized input trees we keep its finger
(the lca in ``T_c`` of the leaves ``L(w)``) and classify the finger's
children as full, empty or mixed with respect to ``L(w)``.  A cluster ``L(u)``
is then written as ``L(w) + S`` with ``|S| <= b``, so a compatibility query
touches only ``O(b)`` leaves of ``T_c``.

Group membership lives in a :class:`~phyloconsensus.kernels.GroupStore`
(bitsets over ``T_c`` node ids).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .dynforest import DynForest
from .micromacro import MicroMacro, default_micro_size, micro_macro_decompose
from .oracles import ClusterError, TrivialCluster, naive_is_compatible
from .table import TieBreakRule, order_table
from .tree import PhyloTree, TreeSet, binarize, signature
from . import setids
from .kernels import GroupStore


class StaleVerdict(ClusterError):
    """The consensus tree changed after the verdict was produced."""


class IncompatibleVerdict(ClusterError):
    pass


FULL, EMPTY, MIXED = 0, 1, 2
CASE_ANCESTOR = "ancestor"      # v is a proper ancestor of finger(w)
CASE_FINGER = "finger"          # v == finger(w)
CASE_SMALL = "small"            # no boundary node, S = L(u)


@dataclass
class CompatVerdict:
    compatible: bool
    v: int
    case: str
    boundary: int                 # global boundary index, -1 if none
    touched: list[int]            # Q, or the touched empty children of the finger
    size: int                     # |L(u)|
    reconnect: int                # |C_r|
    remain: int                   # |C| - |C_r|
    generation: int


@dataclass
class EngineStats:
    credit: int = 0
    lca_calls: int = 0
    lca_ext_calls: int = 0
    max_query_calls: int = 0
    queries: int = 0
    accepted: int = 0
    reconnections: int = 0
    method1: int = 0
    method2: int = 0
    timings: dict = field(default_factory=dict)

    def credit_bound(self, n: int) -> float:
        return n * math.log2(n) if n > 1 else 0.0


class ConsensusState:
    """Current consensus tree plus the per-boundary-node bookkeeping."""

    def __init__(self, ts: TreeSet, b: int | None = None, *, check_budget: bool = True):
        n = ts.n
        self.ts = ts
        self.n = n
        self.b = default_micro_size(n) if b is None else b
        self.stats = EngineStats()
        self.generation = 0
        self.check_budget = check_budget
        self._counter: dict[int, int] = {}

        # T_c: node 0 is the root, node x in 1..n is the leaf labelled x
        f = self.forest = DynForest()
        f.make_node(False)
        for _ in range(n):
            f.make_node(True)
        for x in range(1, n + 1):
            f.link(x, 0)
        self.root = 0
        self.parent = [-1] + [0] * n
        self.children: list[set[int]] = [set(range(1, n + 1))] + [set() for _ in range(n)]
        self.size = [n] + [1] * n
        self.reverse: list[set[int]] = [set() for _ in range(n + 1)]

        # boundary nodes of every tree
        self.decomp: list[MicroMacro] = []
        self.bindex: list[dict[int, int]] = []
        self.b_size: list[int] = []
        self.finger: list[int] = []
        inits = []
        all_leaves = ((1 << (n + 1)) - 1) ^ 1
        for t in ts:
            mm = micro_macro_decompose(binarize(t), self.b)
            self.decomp.append(mm)
            bt = mm.tree
            masks = [0] * len(bt)
            for x in bt.postorder():
                if bt.label[x]:
                    masks[x] = 1 << bt.label[x]
                else:
                    a, c = bt.children[x]
                    masks[x] = masks[a] | masks[c]
            idx = {}
            for w in mm.boundary_nodes():
                if w in idx:
                    continue
                gi = len(self.finger)
                idx[w] = gi
                full = masks[w]
                sz = full.bit_count()
                self.b_size.append(sz)
                if sz == 1:
                    fing = bt.label[w]
                    full = empty = 0
                else:
                    fing = 0
                    empty = all_leaves ^ full
                self.finger.append(fing)
                self.reverse[fing].add(gi)
                inits.append((full, empty))
            self.bindex.append(idx)
        # T_c never has more than 2n - 1 nodes
        self.groups = GroupStore(len(inits), 2 * n + 1)
        for gi, (full, empty) in enumerate(inits):
            self.groups.init_group(gi, full, empty)

    @property
    def boundary_count(self) -> int:
        return len(self.finger)

    # -- compatibility query -------------------------------------------------

    def cluster_delta(self, tree: int, node: int) -> tuple[int, list[int]]:
        w, s = self.decomp[tree].cluster_delta(node)
        return (-1 if w is None else self.bindex[tree][w]), s

    def check_compatible(self, tree: int, node: int) -> CompatVerdict:
        usize = self.ts[tree].subtree_sizes()[node]
        if usize <= 1 or usize >= self.n:
            raise TrivialCluster(f"cluster of size {usize} is trivial for n={self.n}")
        bw, S = self.cluster_delta(tree, node)
        f = self.forest
        lca = f.lca_raw
        ext = f.lca_ext_raw
        sub = f.subtree_leaves
        counter = self._counter
        st = self.stats
        touched: list[int] = []
        if bw >= 0:
            fing = self.finger[bw]
            v = fing
            for x in S:
                v = lca(v, x)
            n_lca = len(S)
        else:
            fing = -1
            v = S[0]
            for x in S[1:]:
                v = lca(v, x)
            n_lca = len(S) - 1
        n_ext = len(S)
        if bw < 0 or v != fing:
            case = CASE_SMALL if bw < 0 else CASE_ANCESTOR
            if bw >= 0:
                c = ext(fing, v)
                counter[c] = self.b_size[bw]
                touched.append(c)
                n_ext += 1
            for x in S:
                c = ext(x, v)
                if c in counter:
                    counter[c] += 1
                else:
                    counter[c] = 1
                    touched.append(c)
            ok = True
            for c in touched:
                if counter[c] != sub(c):
                    ok = False
                    break
            for c in touched:
                del counter[c]
            reconnect = len(touched)
            remain = len(self.children[v]) - reconnect
        else:
            # children of the finger: full ones lie inside L(u), mixed ones
            # must be completed by S, touched empty ones must be covered by S
            case = CASE_FINGER
            grp = self.groups
            g = grp.total(bw, FULL) + grp.total(bw, MIXED) - self.b_size[bw] - len(S)
            is_empty = grp.is_empty
            seen = []
            for x in S:
                c = ext(x, v)
                if c not in counter:
                    counter[c] = 1
                    seen.append(c)
                    if is_empty(bw, c):
                        g += sub(c)
                        touched.append(c)
            for c in seen:
                del counter[c]
            ok = g == 0
            reconnect = grp.count(bw, FULL) + grp.count(bw, MIXED) + len(touched)
            remain = grp.count(bw, EMPTY) - len(touched)
        calls = n_lca + n_ext
        st.queries += 1
        st.lca_calls += n_lca
        st.lca_ext_calls += n_ext
        if calls > st.max_query_calls:
            st.max_query_calls = calls
        if self.check_budget and calls > 2 * (len(S) + 1):
            raise AssertionError(f"query used {calls} lca calls for |S|={len(S)}")
        return CompatVerdict(ok, v, case, bw, touched, usize, reconnect, remain, self.generation)

    def _fresh(self, verdict: CompatVerdict) -> None:
        if verdict.generation != self.generation:
            raise StaleVerdict("consensus tree changed since this verdict was computed")
        if not verdict.compatible:
            raise IncompatibleVerdict("cluster is not compatible with the consensus tree")

    def retrieve_reconnect_sets(self, verdict: CompatVerdict, side: str = "reconnect") -> list[int]:
        """``C_r`` (``side='reconnect'``) or ``C \\ C_r`` (``side='remain'``)."""
        self._fresh(verdict)
        v = verdict.v
        if verdict.case != CASE_FINGER:
            if side == "reconnect":
                return list(verdict.touched)
            q = set(verdict.touched)
            return [c for c in self.children[v] if c not in q]
        bw = verdict.boundary
        grp = self.groups
        if side == "reconnect":
            return grp.members(bw, FULL) + grp.members(bw, MIXED) + list(verdict.touched)
        seen = set(verdict.touched)
        return [c for c in grp.members(bw, EMPTY) if c not in seen]

    # -- update --------------------------------------------------------------

    def add_cluster(self, verdict: CompatVerdict) -> int:
        """Insert the verified cluster; return the new ``T_c`` node for it."""
        self._fresh(verdict)
        x, y = verdict.reconnect, verdict.remain
        if not (2 <= x and y >= 1):
            raise AssertionError(f"degenerate update |C_r|={x}, |C \\ C_r|={y}")
        f = self.forest
        v = verdict.v
        small_is_reconnect = x <= y
        side = self.retrieve_reconnect_sets(verdict, "reconnect" if small_is_reconnect else "remain")
        new = f.make_node(False)
        self.parent.append(-1)
        self.children.append(set())
        self.reverse.append(set())
        ch_v = self.children[v]
        p = self.parent[v]
        if small_is_reconnect:
            # method 1: new node under v takes C_r
            for c in side:
                f.cut(c)
                f.link(c, new)
                self.parent[c] = new
            f.link(new, v)
            ch_v.difference_update(side)
            ch_v.add(new)
            self.children[new] = set(side)
            self.parent[new] = v
            self.size.append(verdict.size)
            upper, lower = v, new
            self.stats.method1 += 1
        else:
            # method 2: new node between v and its parent takes C \ C_r and v
            for c in side:
                f.cut(c)
                f.link(c, new)
                self.parent[c] = new
            if p >= 0:
                f.cut(v)
                f.link(new, p)
                self.children[p].discard(v)
                self.children[p].add(new)
            else:
                self.root = new
            f.link(v, new)
            ch_v.difference_update(side)
            self.children[new] = set(side)
            self.children[new].add(v)
            self.parent[new] = p
            self.parent[v] = new
            self.size.append(self.size[v])
            self.size[v] = verdict.size
            upper, lower = new, v
            self.stats.method2 += 1
        self._update_fingers(v, upper, lower, side, small_is_reconnect, verdict.size)
        if not small_is_reconnect and p >= 0 and self.reverse[p]:
            self.groups.rename(self.reverse[p], v, new)
        cost = min(x, y)
        self.stats.credit += cost
        self.stats.reconnections += len(side)
        self.stats.accepted += 1
        self.generation += 1
        return lower

    def _update_fingers(self, v: int, upper: int, lower: int, side: list[int],
                        side_is_reconnect: bool, usize: int) -> None:
        movers = self.reverse[v]
        if not movers:
            return
        self.reverse[v] = set()
        movers = list(movers)
        down = self.groups.split(movers, side, self.size, side_is_reconnect, lower, usize)
        finger = self.finger
        rl, ru = self.reverse[lower], self.reverse[upper]
        for bw, d in zip(movers, down):
            if d:
                finger[bw] = lower
                rl.add(bw)
            else:
                finger[bw] = upper
                ru.add(bw)

    # -- export and audits ---------------------------------------------------

    def to_tree(self) -> PhyloTree:
        ids = {}
        order = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            ids[x] = len(order)
            order.append(x)
            stack.extend(sorted(self.children[x]))
        children = [[ids[c] for c in sorted(self.children[x])] for x in order]
        label = [x if 1 <= x <= self.n else 0 for x in order]
        return PhyloTree.from_children(children, label)

    def audit(self) -> None:
        """Full recomputation of every invariant (debug use, quadratic)."""
        n = self.n
        f = self.forest
        if self._counter:
            raise AssertionError("scratch counters not cleared")
        m = len(self.parent)
        parents = f.real_parents()
        if parents != self.parent:
            raise AssertionError("forest parents disagree with the child index")
        for x in range(m):
            for c in self.children[x]:
                if self.parent[c] != x:
                    raise AssertionError(f"child index broken at {x}->{c}")
        cl = [0] * m
        stack = [self.root]
        order = []
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(self.children[x])
        if len(order) != m:
            raise AssertionError("child index does not span all nodes")
        for x in reversed(order):
            cl[x] = (1 << x) if 1 <= x <= n else 0
            for c in self.children[x]:
                cl[x] |= cl[c]
        for x in range(m):
            if cl[x].bit_count() != self.size[x] or f.subtree_leaves(x) != self.size[x]:
                raise AssertionError(f"leaf count mismatch at {x}")
            if x > n and len(self.children[x]) < 2:
                raise AssertionError(f"inner node {x} has fewer than two children")
        for i, mm in enumerate(self.decomp):
            bt = mm.tree
            for w, bw in self.bindex[i].items():
                lw = 0
                for lab in bt.leaves(w):
                    lw |= 1 << lab
                # lowest T_c node containing L(w)
                best = min((x for x in range(m) if cl[x] & lw == lw), key=lambda x: self.size[x])
                if self.finger[bw] != best:
                    raise AssertionError(f"finger of boundary {bw} is {self.finger[bw]}, lca is {best}")
                if bw not in self.reverse[best]:
                    raise AssertionError("reverse index is missing a finger")
                if lw.bit_count() == 1:
                    continue
                want = [0, 0, 0]
                cnt = [0, 0, 0]
                sm = [0, 0, 0]
                for c in self.children[best]:
                    inter = cl[c] & lw
                    g = FULL if inter == cl[c] else EMPTY if inter == 0 else MIXED
                    want[g] |= 1 << c
                    cnt[g] += 1
                    sm[g] += self.size[c]
                if self.groups.snapshot(bw) != (tuple(want), tuple(cnt), tuple(sm)):
                    raise AssertionError(f"groups of boundary {bw} are wrong")
        for x in range(m):
            for bw in self.reverse[x]:
                if self.finger[bw] != x:
                    raise AssertionError("reverse index lists a stale finger")


def init_state(ts: TreeSet, b: int | None = None) -> ConsensusState:
    return ConsensusState(ts, b)


def check_compatible(st: ConsensusState, tree: int, node: int) -> CompatVerdict:
    return st.check_compatible(tree, node)


def retrieve_reconnect_sets(st: ConsensusState, verdict: CompatVerdict,
                            side: str = "reconnect") -> list[int]:
    return st.retrieve_reconnect_sets(verdict, side)


def add_cluster(st: ConsensusState, verdict: CompatVerdict) -> int:
    return st.add_cluster(verdict)


def _ordered_entries(ts: TreeSet, tie_break):
    ids = setids.assign_ids_fast(ts)
    table = setids.count_frequencies(ts, ids)
    return table, order_table(table, tie_break, table.nontrivial())


def greedy_run(ts: TreeSet, tie_break: TieBreakRule | str | None = None, *,
               b: int | None = None, audit: bool = False) -> tuple[PhyloTree, ConsensusState]:
    """Greedy consensus plus the final engine state (for its statistics).

    With ``audit`` every invariant is recomputed from scratch after each
    accepted cluster, and the signature of the consensus tree is checked to
    grow by exactly that cluster.
    """
    t0 = time.perf_counter()
    table, order = _ordered_entries(ts, tie_break)
    t1 = time.perf_counter()
    st = ConsensusState(ts, b)
    t2 = time.perf_counter()
    if audit:
        st.audit()
        sig = signature(st.to_tree())
    for e in order:
        verdict = st.check_compatible(e.tree, e.node)
        if audit and verdict.compatible != naive_is_compatible(st.to_tree(), table.cluster(e)):
            raise AssertionError(f"compatibility verdict wrong for {table.labels(e)}")
        if verdict.compatible:
            st.add_cluster(verdict)
            if audit:
                st.audit()
                new_sig = signature(st.to_tree())
                if new_sig != sig | {table.cluster(e)}:
                    raise AssertionError("signature did not grow by exactly the added cluster")
                sig = new_sig
    t3 = time.perf_counter()
    st.stats.timings = {"frequencies": t1 - t0, "init": t2 - t1, "greedy": t3 - t2}
    return st.to_tree(), st


def greedy_consensus(ts: TreeSet, tie_break: TieBreakRule | str | None = None, *,
                     b: int | None = None, audit: bool = False) -> PhyloTree:
    """Greedy consensus tree using the fast identifier pass and engine."""
    return greedy_run(ts, tie_break, b=b, audit=audit)[0]
