"""Pure-Python link/cut forest with leaf-count aggregates.

Preferred paths are splay trees ordered top to bottom.  ``par`` doubles as
the path-parent pointer when a node is the root of its splay tree.  ``own``
counts the leaves hanging off a node through non-preferred edges, plus one
if the node itself is a leaf; ``agg`` sums ``own`` over a splay subtree.
"""

from __future__ import annotations

from .errors import ForestError

NONE = -1


class LinkCutForestBase:
    def __init__(self) -> None:
        self.left: list[int] = []
        self.right: list[int] = []
        self.par: list[int] = []
        self.own: list[int] = []
        self.agg: list[int] = []
        self.leaf: list[int] = []
        self.rotations = 0

    def __len__(self) -> int:
        return len(self.par)

    # -- splay machinery -----------------------------------------------------

    def _rotate(self, x: int) -> None:
        left, right, par, agg, own = self.left, self.right, self.par, self.agg, self.own
        p = par[x]
        g = par[p]
        if left[p] == x:
            b = right[x]
            left[p] = b
            right[x] = p
        else:
            b = left[x]
            right[p] = b
            left[x] = p
        if b != NONE:
            par[b] = p
        par[p] = x
        par[x] = g
        if g != NONE:
            if left[g] == p:
                left[g] = x
            elif right[g] == p:
                right[g] = x
        s = own[p]
        c = left[p]
        if c != NONE:
            s += agg[c]
        c = right[p]
        if c != NONE:
            s += agg[c]
        agg[p] = s
        s = own[x]
        c = left[x]
        if c != NONE:
            s += agg[c]
        c = right[x]
        if c != NONE:
            s += agg[c]
        agg[x] = s
        self.rotations += 1

    def _is_root(self, x: int) -> bool:
        p = self.par[x]
        return p == NONE or (self.left[p] != x and self.right[p] != x)

    def _splay(self, x: int) -> None:
        left, par = self.left, self.par
        is_root = self._is_root
        rotate = self._rotate
        while not is_root(x):
            p = par[x]
            if not is_root(p):
                g = par[p]
                if (left[g] == p) == (left[p] == x):
                    rotate(p)
                else:
                    rotate(x)
            rotate(x)

    def _pull(self, x: int) -> None:
        s = self.own[x]
        c = self.left[x]
        if c != NONE:
            s += self.agg[c]
        c = self.right[x]
        if c != NONE:
            s += self.agg[c]
        self.agg[x] = s

    def _access(self, x: int) -> int:
        """Make root..x a preferred path; return the last node joined onto it."""
        right, par, own, agg = self.right, self.par, self.own, self.agg
        last = NONE
        y = x
        while y != NONE:
            self._splay(y)
            r = right[y]
            if r != NONE:
                own[y] += agg[r]
            if last != NONE:
                own[y] -= agg[last]
            right[y] = last
            self._pull(y)
            last = y
            y = par[y]
        self._splay(x)
        return last

    def _leftmost(self, x: int) -> int:
        left = self.left
        while left[x] != NONE:
            x = left[x]
        self._splay(x)
        return x

    # -- public operations -------------------------------------------------

    def make_node(self, is_leaf: bool = False) -> int:
        v = len(self.par)
        self.left.append(NONE)
        self.right.append(NONE)
        self.par.append(NONE)
        c = 1 if is_leaf else 0
        self.own.append(c)
        self.agg.append(c)
        self.leaf.append(c)
        return v

    def find_root(self, v: int) -> int:
        self._access(v)
        return self._leftmost(v)

    def connected(self, u: int, v: int) -> bool:
        return u == v or self.find_root(u) == self.find_root(v)

    def link(self, child: int, parent: int) -> None:
        self._access(child)
        if self.left[child] != NONE:
            raise ForestError(f"node {child} is not the root of its tree")
        if self.find_root(parent) == child:
            raise ForestError(f"linking {child} under {parent} would create a cycle")
        self._access(parent)
        self._access(child)
        self.par[child] = parent
        self.own[parent] += self.agg[child]
        self._pull(parent)

    def cut(self, v: int) -> None:
        self._access(v)
        lo = self.left[v]
        if lo == NONE:
            raise ForestError(f"node {v} has no parent")
        self.par[lo] = NONE
        self.left[v] = NONE
        self._pull(v)

    def parent(self, v: int) -> int:
        """Tree parent of ``v`` or ``-1``."""
        self._access(v)
        t = self.left[v]
        if t == NONE:
            return NONE
        while self.right[t] != NONE:
            t = self.right[t]
        self._splay(t)
        return t

    def count_leaves(self, v: int) -> int:
        self._access(v)
        return self.agg[v]

    def subtree_leaves(self, v: int) -> int:
        # after access every child edge of v is non-preferred
        self._access(v)
        return self.own[v]

    def lca_raw(self, u: int, v: int) -> int:
        """Lowest common ancestor, or ``-1`` for different trees."""
        if u == v:
            return u
        self._access(u)
        w = self._access(v)
        if w == u:
            return u
        self._splay(u)
        # in the same tree u now hangs off the root path by a path-parent
        return w if self.par[u] != NONE else NONE

    def lca_ext_raw(self, u: int, v: int) -> int:
        """Child of lca(u, v) on the way to ``u``; ``-1`` if u is an ancestor of v.

        Both nodes must be in the same tree (not checked here).
        """
        self._access(v)
        right, par, own, agg = self.right, self.par, self.own, self.agg
        last = NONE
        top = NONE
        y = u
        while y != NONE:
            self._splay(y)
            if par[y] == NONE and last != NONE:
                last = self._leftmost(last)
                top = last
            r = right[y]
            if r != NONE:
                own[y] += agg[r]
            if last != NONE:
                own[y] -= agg[last]
            right[y] = last
            self._pull(y)
            last = y
            y = par[y]
        self._splay(u)
        return top

    # -- debugging -----------------------------------------------------------

    def state(self) -> tuple[list[int], list[int], list[int], list[int], list[int], list[int]]:
        return self.left, self.right, self.par, self.own, self.agg, self.leaf
