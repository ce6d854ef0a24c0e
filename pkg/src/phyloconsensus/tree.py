"""Rooted phylogenetic trees over leaf labels ``1..n``.

Trees are stored as a node arena (parallel lists indexed by node id).  A node
is a leaf iff it carries a label; inner nodes must have at least two children.
All traversals are iterative so caterpillars with thousands of leaves do not
hit the recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Cluster = frozenset


class TreeError(ValueError):
    """Raised when a tree violates the phylogenetic tree invariants."""


class NewickError(TreeError):
    """Raised for malformed Newick input."""


class PhyloTree:
    """Unordered rooted tree whose leaves are bijectively labelled ``1..n``.

    ``parent[v]`` is ``-1`` for the root, ``children[v]`` keeps the order in
    which children were written, and ``label[v]`` is ``0`` for inner nodes.
    """

    __slots__ = ("parent", "children", "label", "root", "n", "_leaf_of", "_sizes")

    def __init__(self, parent: list[int], children: list[list[int]],
                 label: list[int], root: int, *, validate: bool = True):
        self.parent = parent
        self.children = children
        self.label = label
        self.root = root
        self.n = sum(1 for x in label if x)
        self._leaf_of: list[int] | None = None
        self._sizes: list[int] | None = None
        if validate:
            self.validate()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_children(cls, children: list[list[int]], label: list[int],
                      *, validate: bool = True) -> "PhyloTree":
        parent = [-1] * len(children)
        for v, ch in enumerate(children):
            for c in ch:
                if parent[c] != -1:
                    raise TreeError(f"node {c} has two parents")
                parent[c] = v
        roots = [v for v in range(len(children)) if parent[v] == -1]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        return cls(parent, children, label, roots[0], validate=validate)

    @classmethod
    def star(cls, n: int) -> "PhyloTree":
        children = [list(range(1, n + 1))] + [[] for _ in range(n)]
        label = list(range(n + 1))
        return cls([-1] + [0] * n, children, label, 0)

    def validate(self) -> None:
        if self.n < 2:
            raise TreeError("a tree needs at least two leaves")
        if self.parent[self.root] != -1:
            raise TreeError("root has a parent")
        seen = [False] * (self.n + 1)
        count = 0
        for v in self.preorder():
            count += 1
            lab = self.label[v]
            ch = self.children[v]
            if lab:
                if ch:
                    raise TreeError(f"labelled node {v} has children")
                if lab < 1 or lab > self.n:
                    raise TreeError(f"label {lab} outside 1..{self.n}")
                if seen[lab]:
                    raise TreeError(f"duplicate label {lab}")
                seen[lab] = True
            elif len(ch) < 2:
                raise TreeError(f"inner node {v} has {len(ch)} child(ren)")
            for c in ch:
                if self.parent[c] != v:
                    raise TreeError(f"parent pointer of {c} is inconsistent")
        if count != len(self.parent):
            raise TreeError("arena contains unreachable nodes")

    # -- basic queries ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"PhyloTree({write_newick(self)!r})"

    def is_leaf(self, v: int) -> bool:
        return self.label[v] != 0

    def preorder(self, start: int | None = None) -> Iterator[int]:
        stack = [self.root if start is None else start]
        children = self.children
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(children[v]))

    def postorder(self, start: int | None = None) -> list[int]:
        """Children before parents; siblings in written order."""
        children = self.children
        # reverse preorder with reversed child lists is a valid postorder
        stack = [self.root if start is None else start]
        out = []
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(children[v])
        out.reverse()
        return out

    def leaf_node(self, lab: int) -> int:
        if self._leaf_of is None:
            leaf_of = [-1] * (self.n + 1)
            for v, x in enumerate(self.label):
                if x:
                    leaf_of[x] = v
            self._leaf_of = leaf_of
        return self._leaf_of[lab]

    def subtree_sizes(self) -> list[int]:
        """Number of leaves below every node (cached)."""
        if self._sizes is None:
            size = [0] * len(self.parent)
            for v in self.postorder():
                if self.label[v]:
                    size[v] = 1
                else:
                    size[v] = sum(size[c] for c in self.children[v])
            self._sizes = size
        return self._sizes

    def leaves(self, v: int) -> list[int]:
        """Labels below ``v`` in depth-first order."""
        label = self.label
        return [label[x] for x in self.preorder(v) if label[x]]

    def cluster(self, v: int) -> Cluster:
        return frozenset(self.leaves(v))

    def clusters(self) -> list[Cluster]:
        """Cluster of every node, indexed by node id."""
        out: list = [None] * len(self.parent)
        for v in self.postorder():
            if self.label[v]:
                out[v] = frozenset((self.label[v],))
            else:
                out[v] = frozenset().union(*(out[c] for c in self.children[v]))
        return out

    def inner_count(self) -> int:
        return len(self.parent) - self.n


# ---------------------------------------------------------------------------
# Newick I/O
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    i, m = 0, len(text)
    while i < m:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),;":
            yield ch, i
            i += 1
        elif ch == ":":
            # branch length: parsed and discarded
            j = i + 1
            while j < m and text[j] not in "(),;" and not text[j].isspace():
                j += 1
            if j == i + 1:
                raise NewickError(f"empty branch length at offset {i}")
            yield ":", i
            i = j
        else:
            j = i
            while j < m and text[j] not in "(),;:" and not text[j].isspace():
                j += 1
            yield text[i:j], i
            i = j


def parse_newick(text: str, names: "TaxonMap | None" = None) -> PhyloTree:
    """Parse a single rooted Newick expression.

    Leaf names must be positive integers unless a :class:`TaxonMap` is given,
    in which case arbitrary names are interned to ``1..n``.  Branch lengths
    are accepted and dropped; inner-node labels are dropped too.
    """
    parent: list[int] = []
    children: list[list[int]] = []
    label: list[int] = []
    stack: list[int] = []
    expect_item = True    # next token should start a subtree
    done = False
    last = -1              # most recently closed/created node

    def new_node(p: int, lab: int) -> int:
        v = len(parent)
        parent.append(p)
        children.append([])
        label.append(lab)
        if p >= 0:
            children[p].append(v)
        return v

    for tok, pos in _tokenize(text):
        if done:
            raise NewickError(f"trailing characters after ';' at offset {pos}")
        if tok == "(":
            if not expect_item:
                raise NewickError(f"unexpected '(' at offset {pos}")
            if stack or not parent:
                v = new_node(stack[-1] if stack else -1, 0)
                stack.append(v)
            else:
                raise NewickError(f"second tree in one expression at offset {pos}")
        elif tok == ",":
            if expect_item or not stack:
                raise NewickError(f"unexpected ',' at offset {pos}")
            expect_item = True
        elif tok == ")":
            if expect_item or not stack:
                raise NewickError(f"unexpected ')' at offset {pos}")
            last = stack.pop()
            expect_item = False
        elif tok == ";":
            if stack or expect_item or not parent:
                raise NewickError(f"unexpected ';' at offset {pos}")
            done = True
        elif tok == ":":
            if expect_item:
                raise NewickError(f"branch length without node at offset {pos}")
        else:
            if expect_item:
                if not stack and parent:
                    raise NewickError(f"second tree in one expression at offset {pos}")
                lab = _leaf_label(tok, pos, names)
                last = new_node(stack[-1] if stack else -1, lab)
                expect_item = False
            elif last >= 0 and label[last] == 0 and children[last]:
                pass  # inner node label, ignored
            else:
                raise NewickError(f"unexpected name {tok!r} at offset {pos}")
    if not done:
        raise NewickError("missing terminating ';'")
    if len(parent) == 1:
        raise TreeError("a tree needs at least two leaves")
    try:
        return PhyloTree(parent, children, label, 0)
    except NewickError:
        raise
    except TreeError as exc:
        raise NewickError(str(exc)) from None


def _leaf_label(tok: str, pos: int, names: "TaxonMap | None") -> int:
    if names is not None:
        return names.intern(tok)
    try:
        lab = int(tok)
    except ValueError:
        raise NewickError(f"leaf name {tok!r} at offset {pos} is not an integer") from None
    if lab < 1:
        raise NewickError(f"leaf label {lab} at offset {pos} is not positive")
    return lab


def write_newick(tree: PhyloTree, canonical: bool = True,
                 names: "TaxonMap | None" = None) -> str:
    """Serialize ``tree``.

    With ``canonical`` the children of every node are ordered by their minimum
    leaf label, so isomorphic trees give identical strings.
    """
    children = tree.children
    label = tree.label
    if canonical:
        minlab = [0] * len(tree)
        for v in tree.postorder():
            minlab[v] = label[v] or min(minlab[c] for c in children[v])
        order = [sorted(ch, key=minlab.__getitem__) for ch in children]
    else:
        order = children
    out: list[str] = []
    stack: list = [tree.root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if label[item]:
            out.append(names.name(label[item]) if names else str(label[item]))
            continue
        out.append("(")
        stack.append(")")
        ch = order[item]
        for i in range(len(ch) - 1, -1, -1):
            stack.append(ch[i])
            if i:
                stack.append(",")
    out.append(";")
    return "".join(out)


class TaxonMap:
    """Interns arbitrary taxon names to ``1..n`` in order of first appearance."""

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}
        self._names: list[str] = [""]

    def intern(self, name: str) -> int:
        lab = self._ids.get(name)
        if lab is None:
            lab = len(self._names)
            self._ids[name] = lab
            self._names.append(name)
        return lab

    def name(self, lab: int) -> str:
        return self._names[lab]

    def __len__(self) -> int:
        return len(self._names) - 1


def read_newick_lines(lines: Iterable[str], names: TaxonMap | None = None) -> list[PhyloTree]:
    """One tree per line; blank lines and ``#`` comments are skipped."""
    trees = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            trees.append(parse_newick(line, names))
        except TreeError as exc:
            raise NewickError(f"line {lineno}: {exc}") from None
    return trees


# ---------------------------------------------------------------------------
# Tree collections
# ---------------------------------------------------------------------------

class LabelSetMismatch(TreeError):
    """Input trees are not all over the same leaf set."""


class TreeSet(Sequence[PhyloTree]):
    """``k >= 1`` trees over the same leaves ``1..n``."""

    def __init__(self, trees: Iterable[PhyloTree]):
        self.trees = list(trees)
        if not self.trees:
            raise TreeError("a tree set needs at least one tree")
        self.n = self.trees[0].n
        for i, t in enumerate(self.trees):
            if t.n != self.n:
                raise LabelSetMismatch(f"tree {i} has {t.n} leaves, tree 0 has {self.n}")

    @classmethod
    def from_newick(cls, texts: Iterable[str]) -> "TreeSet":
        return cls(parse_newick(t) for t in texts)

    def __len__(self) -> int:
        return len(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    @property
    def k(self) -> int:
        return len(self.trees)

    def node_count(self) -> int:
        return sum(len(t) for t in self.trees)


# ---------------------------------------------------------------------------
# Cluster algebra
# ---------------------------------------------------------------------------

def signature(tree: PhyloTree) -> set[Cluster]:
    return set(tree.clusters())


def clusters_compatible(a, b) -> bool:
    """Disjoint or nested.  Works on frozensets or on integer bitsets."""
    if isinstance(a, int):
        inter = a & b
        return inter == 0 or inter == a or inter == b
    inter = a & b
    return not inter or len(inter) == len(a) or len(inter) == len(b)


def to_bits(cluster: Iterable[int]) -> int:
    bits = 0
    for x in cluster:
        bits |= 1 << x
    return bits


def from_bits(bits: int) -> Cluster:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return frozenset(out)


def isomorphic(a: PhyloTree, b: PhyloTree) -> bool:
    return a.n == b.n and signature(a) == signature(b)


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------

@dataclass
class BinarizedTree:
    """Binary refinement of ``original``.

    ``origin_map[u]`` is the node of ``tree`` whose cluster equals the
    cluster of ``u`` in ``original``; ``origin_of[x]`` maps back (``-1`` for
    the chain nodes introduced by binarization).
    """

    tree: PhyloTree
    original: PhyloTree
    origin_map: list[int]
    origin_of: list[int]


def binarize(tree: PhyloTree) -> BinarizedTree:
    """Replace every node with ``d > 2`` children by a left-leaning chain."""
    parent: list[int] = []
    children: list[list[int]] = []
    label: list[int] = []
    origin_of: list[int] = []
    origin_map = [-1] * len(tree)

    def new(lab: int, orig: int) -> int:
        parent.append(-1)
        children.append([])
        label.append(lab)
        origin_of.append(orig)
        return len(parent) - 1

    for u in tree.postorder():
        ch = tree.children[u]
        if not ch:
            origin_map[u] = new(tree.label[u], u)
            continue
        acc = origin_map[ch[0]]
        for j in range(1, len(ch)):
            top = j == len(ch) - 1
            x = new(0, u if top else -1)
            children[x] = [acc, origin_map[ch[j]]]
            parent[acc] = x
            parent[origin_map[ch[j]]] = x
            acc = x
        origin_map[u] = acc
    bt = PhyloTree(parent, children, label, origin_map[tree.root], validate=False)
    return BinarizedTree(bt, tree, origin_map, origin_of)


def relabel(tree: PhyloTree, mapping) -> PhyloTree:
    """Copy of ``tree`` with leaf ``x`` renamed ``mapping[x]``."""
    label = [mapping[x] if x else 0 for x in tree.label]
    return PhyloTree(list(tree.parent), [list(c) for c in tree.children], label, tree.root)


def restrict(tree: PhyloTree, keep: Iterable[int]) -> PhyloTree:
    """Subtree induced by the leaves in ``keep``, relabelled to ``1..len(keep)``.

    Inner nodes left with a single child are suppressed.
    """
    keep = sorted(set(keep))
    if len(keep) < 2:
        raise TreeError("a restricted tree needs at least two leaves")
    rank = {x: i + 1 for i, x in enumerate(keep)}
    children: list[list[int]] = []
    label: list[int] = []
    built: dict[int, int] = {}
    for v in tree.postorder():
        lab = tree.label[v]
        if lab:
            if lab in rank:
                built[v] = len(children)
                children.append([])
                label.append(rank[lab])
            continue
        ch = [built[c] for c in tree.children[v] if c in built]
        if not ch:
            continue
        if len(ch) == 1:
            built[v] = ch[0]
            continue
        built[v] = len(children)
        children.append(ch)
        label.append(0)
    return PhyloTree.from_children(children, label)
