"""Seeded random tree and tree-set generators used by tests, verify and bench."""

from __future__ import annotations

import random

from .tree import PhyloTree, TreeSet


def random_tree(n: int, rng: random.Random, multifurcation: float = 0.2,
                max_degree: int = 5) -> PhyloTree:
    """Uniform recursive splits of a shuffled label list.

    With probability ``multifurcation`` a block is split into 3..max_degree
    parts instead of two.
    """
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    parent: list[int] = [-1]
    children: list[list[int]] = [[]]
    label: list[int] = [0]
    stack = [(0, 0, n)]
    while stack:
        v, lo, hi = stack.pop()
        m = hi - lo
        if m == 1:
            label[v] = labels[lo]
            continue
        d = 2
        if m > 2 and rng.random() < multifurcation:
            d = rng.randint(3, min(m, max_degree))
        cuts = sorted(rng.sample(range(lo + 1, hi), d - 1))
        bounds = [lo] + cuts + [hi]
        for a, b in zip(bounds, bounds[1:]):
            c = len(parent)
            parent.append(v)
            children.append([])
            label.append(0)
            children[v].append(c)
            stack.append((c, a, b))
    return PhyloTree(parent, children, label, 0)


def caterpillar(order: list[int]) -> PhyloTree:
    """``(((a,b),c),d)...`` with leaves in the given order."""
    n = len(order)
    parent = [-1]
    children: list[list[int]] = [[]]
    label = [0]
    v = 0
    for i in range(n - 1, 0, -1):
        leaf = len(parent)
        parent.append(v)
        children.append([])
        label.append(order[i])
        if i == 1:
            inner = len(parent)
            parent.append(v)
            children.append([])
            label.append(order[0])
            children[v] = [inner, leaf]
        else:
            inner = len(parent)
            parent.append(v)
            children.append([])
            label.append(0)
            children[v] = [inner, leaf]
            v = inner
    return PhyloTree(parent, children, label, 0)


def perturb(tree: PhyloTree, rng: random.Random, swaps: int = 2,
            collapse: float = 0.1) -> PhyloTree:
    """Swap a few leaf labels and contract a fraction of inner edges."""
    label = list(tree.label)
    leaves = [v for v, x in enumerate(label) if x]
    for _ in range(swaps):
        a, b = rng.sample(leaves, 2)
        label[a], label[b] = label[b], label[a]
    children = [list(c) for c in tree.children]
    root = tree.root
    # contract inner non-root nodes; postorder visits v before its parent, so
    # the original parent is still the current one when v is spliced out
    for v in tree.postorder():
        if v == root or label[v] or rng.random() >= collapse:
            continue
        par = tree.parent[v]
        idx = children[par].index(v)
        children[par][idx:idx + 1] = children[v]
        children[v] = []
        label[v] = -1
    keep = [v for v in range(len(label)) if label[v] != -1]
    remap = {v: i for i, v in enumerate(keep)}
    new_children = [[remap[c] for c in children[v]] for v in keep]
    new_label = [label[v] for v in keep]
    return PhyloTree.from_children(new_children, new_label)


def random_treeset(k: int, n: int, rng: random.Random, *, correlated: bool = True,
                   multifurcation: float = 0.2) -> TreeSet:
    """``k`` trees on ``n`` leaves.

    Correlated sets perturb one base tree so that clusters repeat across
    trees and the frequency ordering is non-trivial.
    """
    if not correlated:
        return TreeSet(random_tree(n, rng, multifurcation) for _ in range(k))
    base = random_tree(n, rng, multifurcation)
    trees = []
    for _ in range(k):
        mode = rng.random()
        if mode < 0.15:
            trees.append(random_tree(n, rng, multifurcation))
        else:
            swaps = rng.randint(0, max(1, n // 8))
            trees.append(perturb(base, rng, swaps=swaps if n > 2 else 0,
                                 collapse=rng.choice([0.0, 0.1, 0.3])))
    return TreeSet(trees)


def adversarial_treeset(k: int, n: int, rng: random.Random, kind: str) -> TreeSet:
    """Caterpillar or star heavy inputs."""
    trees = []
    for i in range(k):
        order = list(range(1, n + 1))
        if kind == "caterpillar":
            if i % 2:
                rng.shuffle(order)
            elif i % 3 == 0 and n > 2:
                a, b = rng.sample(range(n), 2)
                order[a], order[b] = order[b], order[a]
            trees.append(caterpillar(order))
        elif kind == "star":
            if i % 2 == 0:
                trees.append(PhyloTree.star(n))
            else:
                trees.append(random_tree(n, rng, multifurcation=0.9, max_degree=max(3, n // 2)))
        else:
            raise ValueError(kind)
    return TreeSet(trees)
