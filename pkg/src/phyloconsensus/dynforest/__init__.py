"""Link/cut forest with leaf counts, lca and extended lca.

The splay-tree kernel is compiled with Cython when the extension is built;
otherwise (or when ``PHYLOCONSENSUS_PURE=1``) the pure-Python kernel is used.
``BACKEND`` names the kernel in use.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ForestError

if os.environ.get("PHYLOCONSENSUS_PURE"):
    from ._lct_py import LinkCutForestBase
    BACKEND = "python"
else:
    try:
        from ._lct import LinkCutForestBase
        BACKEND = "cython"
    except ImportError:
        from ._lct_py import LinkCutForestBase
        BACKEND = "python"


@dataclass(frozen=True)
class Ancestor:
    """Result of :meth:`DynForest.lca_ext` when ``u`` is an ancestor of ``v``."""


ANCESTOR = Ancestor()


@dataclass(frozen=True)
class EdgeRef:
    """The edge from ``child`` to its parent."""

    child: int


class DynForest(LinkCutForestBase):
    """Checked public surface over the selected kernel.

    Hot loops call ``lca_raw`` / ``lca_ext_raw`` directly; these return ``-1``
    in place of the ``None`` / :data:`ANCESTOR` results below and skip the
    same-tree check.
    """

    def lca(self, u: int, v: int) -> int | None:
        w = self.lca_raw(u, v)
        return None if w < 0 else w

    def lca_ext(self, u: int, v: int) -> EdgeRef | Ancestor:
        if not self.connected(u, v):
            raise ForestError(f"nodes {u} and {v} are in different trees")
        c = self.lca_ext_raw(u, v)
        return ANCESTOR if c < 0 else EdgeRef(c)

    def real_parents(self) -> list[int]:
        """Tree parent of every node, recovered from the splay representation."""
        left, right, par, *_ = self.state()
        m = len(par)
        out = [-1] * m
        for x in range(m):
            p = par[x]
            if p != -1 and (left[p] == x or right[p] == x):
                continue
            # x is a splay root: walk its in-order sequence (top to bottom)
            seq = []
            stack = []
            y = x
            while stack or y != -1:
                while y != -1:
                    stack.append(y)
                    y = left[y]
                y = stack.pop()
                seq.append(y)
                y = right[y]
            out[seq[0]] = p
            for a, b in zip(seq, seq[1:]):
                out[b] = a
        return out

    def audit(self) -> None:
        """Recompute every aggregate from scratch and compare."""
        left, right, par, own, agg, leaf = (list(a) for a in self.state())
        m = len(par)
        parents = self.real_parents()
        kids: list[list[int]] = [[] for _ in range(m)]
        for x, p in enumerate(parents):
            if p != -1:
                kids[p].append(x)
        sub = list(leaf)
        order = []
        for r in (x for x in range(m) if parents[x] == -1):
            stack = [r]
            while stack:
                y = stack.pop()
                order.append(y)
                stack.extend(kids[y])
        for y in reversed(order):
            for c in kids[y]:
                sub[y] += sub[c]
        for x in range(m):
            # children on a different preferred path are non-preferred
            expected = leaf[x] + sum(sub[c] for c in kids[x] if not _on_same_path(x, c, left, right, par))
            if own[x] != expected:
                raise AssertionError(f"own[{x}]={own[x]} expected {expected}")
            s = own[x] + (agg[left[x]] if left[x] != -1 else 0) + (agg[right[x]] if right[x] != -1 else 0)
            if agg[x] != s:
                raise AssertionError(f"agg[{x}]={agg[x]} expected {s}")


def _splay_root(x, left, right, par):
    while True:
        p = par[x]
        if p == -1 or (left[p] != x and right[p] != x):
            return x
        x = p


def _on_same_path(x, c, left, right, par):
    return _splay_root(x, left, right, par) == _splay_root(c, left, right, par)


__all__ = ["DynForest", "ForestError", "EdgeRef", "Ancestor", "ANCESTOR", "BACKEND"]
