"""Micro-macro decomposition of binary trees.

Every micro tree is a connected set of at most ``b`` nodes whose root is the
*top* boundary node; all edges leaving it downwards start at a single
*bottom* boundary node.  Construction is a bottom-up greedy merge; the
validator below is what defines correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tree import BinarizedTree, PhyloTree


@dataclass
class MicroTree:
    top: int
    bottom: int           # -1 when nothing hangs below the micro tree
    nodes: list[int]


@dataclass
class MicroMacro:
    bt: BinarizedTree
    b: int
    micros: list[MicroTree]
    micro_of: list[int]
    _has_bottom: list[bool] | None = None

    @property
    def tree(self) -> PhyloTree:
        return self.bt.tree

    def boundary_nodes(self) -> list[int]:
        out = []
        for m in self.micros:
            out.append(m.top)
            if m.bottom >= 0:
                out.append(m.bottom)
        return out

    def is_boundary(self, x: int) -> bool:
        m = self.micros[self.micro_of[x]]
        return x == m.top or x == m.bottom

    def _bottom_below(self) -> list[bool]:
        # has[x]: the bottom boundary of x's micro tree is x or below x
        if self._has_bottom is None:
            t = self.tree
            micro_of = self.micro_of
            has = [False] * len(t)
            for x in t.postorder():
                m = micro_of[x]
                if self.micros[m].bottom == x:
                    has[x] = True
                else:
                    has[x] = any(has[c] for c in t.children[x] if micro_of[c] == m)
            self._has_bottom = has
        return self._has_bottom

    def cluster_delta(self, u: int) -> tuple[int | None, list[int]]:
        """Split ``L(u)`` (``u`` a node of the original tree) as ``L(w) + S``.

        Returns ``(w, S)`` with ``w`` a boundary node of the binarized tree
        and ``S`` the leaves it misses, or ``(None, L(u))`` when no boundary
        node lies inside the micro tree below ``u``.
        """
        x = self.bt.origin_map[u]
        t = self.tree
        m = self.micros[self.micro_of[x]]
        if x == m.top or x == m.bottom:
            return x, []
        if not self._bottom_below()[x]:
            return None, t.leaves(x)
        bb = m.bottom
        label = t.label
        children = t.children
        out = []
        stack = [x]
        while stack:
            y = stack.pop()
            if y == bb:
                continue
            if label[y]:
                out.append(label[y])
            else:
                stack.extend(children[y])
        return bb, out


def micro_macro_decompose(bt: BinarizedTree, b: int) -> MicroMacro:
    if b < 1:
        raise ValueError("micro tree size bound must be positive")
    t = bt.tree
    size = [0] * len(t)
    hole = [-1] * len(t)
    micro_of = [-1] * len(t)
    micros: list[MicroTree] = []
    children = t.children

    def close(r: int) -> None:
        idx = len(micros)
        nodes = []
        stack = [r]
        while stack:
            y = stack.pop()
            micro_of[y] = idx
            nodes.append(y)
            stack.extend(c for c in children[y] if micro_of[c] < 0)
        micros.append(MicroTree(r, hole[r], nodes))

    for v in t.postorder():
        ch = children[v]
        if not ch:
            size[v] = 1
            continue
        if len(ch) != 2:
            raise ValueError("micro-macro decomposition needs a binary tree")
        a, c = ch
        sa, sc = size[a], size[c]
        if sa + sc + 1 <= b and (hole[a] < 0 or hole[c] < 0):
            size[v] = sa + sc + 1
            hole[v] = hole[a] if hole[a] >= 0 else hole[c]
            continue
        big, small = (a, c) if sa >= sc else (c, a)
        hole[v] = v
        if hole[small] < 0 and size[small] + 1 <= b:
            close(big)
            size[v] = size[small] + 1
        elif hole[big] < 0 and size[big] + 1 <= b:
            close(small)
            size[v] = size[big] + 1
        else:
            close(big)
            close(small)
            size[v] = 1
    close(t.root)
    return MicroMacro(bt, b, micros, micro_of)


def default_micro_size(n: int) -> int:
    return max(1, math.isqrt(n - 1) + 1) if n > 1 else 1


def validate_decomposition(mm: MicroMacro, c: int = 8) -> None:
    """Raise ``AssertionError`` unless every micro-macro invariant holds."""
    t = mm.tree
    seen = [0] * len(t)
    for idx, m in enumerate(mm.micros):
        if len(m.nodes) > mm.b:
            raise AssertionError(f"micro tree {idx} has {len(m.nodes)} > {mm.b} nodes")
        members = set(m.nodes)
        for x in m.nodes:
            seen[x] += 1
            if mm.micro_of[x] != idx:
                raise AssertionError(f"membership map disagrees at node {x}")
            if x != m.top and t.parent[x] not in members:
                raise AssertionError(f"micro tree {idx} is not connected at node {x}")
        if t.parent[m.top] != -1 and t.parent[m.top] in members:
            raise AssertionError(f"top of micro tree {idx} is not its root")
        if m.bottom >= 0 and m.bottom not in members:
            raise AssertionError(f"bottom of micro tree {idx} lies outside it")
    if any(s != 1 for s in seen):
        raise AssertionError("micro trees do not partition the nodes")
    for x in range(len(t)):
        p = t.parent[x]
        if p < 0 or mm.micro_of[p] == mm.micro_of[x]:
            continue
        if mm.micros[mm.micro_of[x]].top != x:
            raise AssertionError(f"node {x} is adjacent to another micro tree but is not a top")
        if mm.micros[mm.micro_of[p]].bottom != p:
            raise AssertionError(f"node {p} has children elsewhere but is not a bottom")
    bound = c * -(-len(t) // mm.b)
    if len(mm.micros) > bound:
        raise AssertionError(f"{len(mm.micros)} micro trees exceed {c}*ceil(N/b)={bound}")
