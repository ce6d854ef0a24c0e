"""Parent-array forest with linear-time queries, plus a seeded differential fuzzer."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import ANCESTOR, DynForest, EdgeRef
from .errors import ForestError


class NaiveForest:
    def __init__(self) -> None:
        self.parent: list[int] = []
        self.leaf: list[bool] = []
        self.kids: list[set[int]] = []

    def __len__(self) -> int:
        return len(self.parent)

    def make_node(self, is_leaf: bool = False) -> int:
        self.parent.append(-1)
        self.leaf.append(bool(is_leaf))
        self.kids.append(set())
        return len(self.parent) - 1

    def path_to_root(self, v: int) -> list[int]:
        out = [v]
        while self.parent[out[-1]] != -1:
            out.append(self.parent[out[-1]])
        return out

    def find_root(self, v: int) -> int:
        return self.path_to_root(v)[-1]

    def link(self, child: int, parent: int) -> None:
        if self.parent[child] != -1:
            raise ForestError(f"node {child} is not the root of its tree")
        if self.find_root(parent) == child:
            raise ForestError(f"linking {child} under {parent} would create a cycle")
        self.parent[child] = parent
        self.kids[parent].add(child)

    def cut(self, v: int) -> None:
        if self.parent[v] == -1:
            raise ForestError(f"node {v} has no parent")
        self.kids[self.parent[v]].discard(v)
        self.parent[v] = -1

    def below(self, v: int) -> list[int]:
        out = [v]
        for x in out:
            out.extend(self.kids[x])
        return out

    def subtree_leaves(self, v: int) -> int:
        return sum(self.leaf[x] for x in self.below(v))

    def count_leaves(self, v: int) -> int:
        return self.subtree_leaves(self.find_root(v))

    def lca(self, u: int, v: int) -> int | None:
        up = self.path_to_root(u)
        seen = set(up)
        for x in self.path_to_root(v):
            if x in seen:
                return x
        return None

    def lca_ext(self, u: int, v: int):
        w = self.lca(u, v)
        if w is None:
            raise ForestError(f"nodes {u} and {v} are in different trees")
        if w == u:
            return ANCESTOR
        up = self.path_to_root(u)
        return EdgeRef(up[up.index(w) - 1])


@dataclass
class FuzzFailure:
    seed: int
    step: int
    op: tuple
    got: object
    want: object
    log: list


OPS = ("link", "cut", "count_leaves", "subtree_leaves", "lca", "lca_ext", "make_node")


def fuzz_forest(seed: int, ops: int = 1000, nodes: int = 40, *, audit_every: int = 0,
                keep_log: bool = False) -> tuple[FuzzFailure | None, DynForest]:
    """Run ``ops`` random operations on both forests; return the first disagreement.

    Errors count as results, so a rejected link must be rejected by both.
    """
    rng = random.Random(seed)
    fast = DynForest()
    slow = NaiveForest()
    for _ in range(nodes):
        leaf = rng.random() < 0.5
        fast.make_node(leaf)
        slow.make_node(leaf)
    log: list = []
    weights = (30, 15, 10, 15, 15, 15, 1)
    for step in range(ops):
        name = rng.choices(OPS, weights)[0]
        m = len(slow)
        if name == "make_node" and m >= 2 * nodes:
            name = "lca"
        if name == "make_node":
            args: tuple = (rng.random() < 0.5,)
        elif name == "link":
            # mostly legal links, occasionally an illegal one
            roots = [x for x in range(m) if slow.parent[x] == -1]
            c = rng.choice(roots) if rng.random() < 0.9 else rng.randrange(m)
            args = (c, rng.randrange(m))
        elif name == "cut":
            inner = [x for x in range(m) if slow.parent[x] != -1]
            args = (rng.choice(inner) if inner and rng.random() < 0.95 else rng.randrange(m),)
        elif name in ("count_leaves", "subtree_leaves"):
            args = (rng.randrange(m),)
        elif name == "lca":
            args = (rng.randrange(m), rng.randrange(m))
        else:
            u = rng.randrange(m)
            if rng.random() < 0.95:
                args = (u, rng.choice(slow.below(slow.find_root(u))))
            else:
                args = (u, rng.randrange(m))
        op = (name,) + args
        if keep_log:
            log.append(op)
        got = _apply(fast, name, args)
        want = _apply(slow, name, args)
        if got != want:
            return FuzzFailure(seed, step, op, got, want, log), fast
        if audit_every and step % audit_every == 0:
            fast.audit()
            if fast.real_parents() != slow.parent:
                return FuzzFailure(seed, step, op, "parents", "parents", log), fast
    return None, fast


def _apply(forest, name: str, args: tuple):
    try:
        return ("ok", getattr(forest, name)(*args))
    except ForestError:
        return ("error",)
