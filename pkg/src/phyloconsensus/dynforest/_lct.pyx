# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled link/cut forest kernel; same surface as ``_lct_py``."""

from libcpp.vector cimport vector

from .errors import ForestError

cdef enum:
    NONE = -1


cdef class LinkCutForestBase:
    cdef vector[int] left, right, par, own, agg, leaf
    cdef public long long rotations

    def __cinit__(self):
        self.rotations = 0

    def __len__(self):
        return self.par.size()

    cdef inline bint _is_root(self, int x) nogil:
        cdef int p = self.par[x]
        return p == NONE or (self.left[p] != x and self.right[p] != x)

    cdef inline void _pull(self, int x) nogil:
        cdef int s = self.own[x]
        cdef int c = self.left[x]
        if c != NONE:
            s += self.agg[c]
        c = self.right[x]
        if c != NONE:
            s += self.agg[c]
        self.agg[x] = s

    cdef void _rotate(self, int x) nogil:
        cdef int p = self.par[x]
        cdef int g = self.par[p]
        cdef int b
        if self.left[p] == x:
            b = self.right[x]
            self.left[p] = b
            self.right[x] = p
        else:
            b = self.left[x]
            self.right[p] = b
            self.left[x] = p
        if b != NONE:
            self.par[b] = p
        self.par[p] = x
        self.par[x] = g
        if g != NONE:
            if self.left[g] == p:
                self.left[g] = x
            elif self.right[g] == p:
                self.right[g] = x
        self._pull(p)
        self._pull(x)
        self.rotations += 1

    cdef void _splay(self, int x) nogil:
        cdef int p, g
        while not self._is_root(x):
            p = self.par[x]
            if not self._is_root(p):
                g = self.par[p]
                if (self.left[g] == p) == (self.left[p] == x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    cdef int _access(self, int x) nogil:
        cdef int last = NONE
        cdef int y = x
        cdef int r
        while y != NONE:
            self._splay(y)
            r = self.right[y]
            if r != NONE:
                self.own[y] += self.agg[r]
            if last != NONE:
                self.own[y] -= self.agg[last]
            self.right[y] = last
            self._pull(y)
            last = y
            y = self.par[y]
        self._splay(x)
        return last

    cdef int _leftmost(self, int x) nogil:
        while self.left[x] != NONE:
            x = self.left[x]
        self._splay(x)
        return x

    cdef inline void _check(self, int v) except *:
        if v < 0 or <size_t>v >= self.par.size():
            raise IndexError(f"node {v} does not exist")

    def make_node(self, bint is_leaf=False):
        cdef int v = self.par.size()
        cdef int c = 1 if is_leaf else 0
        self.left.push_back(NONE)
        self.right.push_back(NONE)
        self.par.push_back(NONE)
        self.own.push_back(c)
        self.agg.push_back(c)
        self.leaf.push_back(c)
        return v

    cpdef int find_root(self, int v) except -2:
        self._check(v)
        self._access(v)
        return self._leftmost(v)

    def connected(self, int u, int v):
        return u == v or self.find_root(u) == self.find_root(v)

    cpdef link(self, int child, int parent):
        self._check(child)
        self._check(parent)
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

    cpdef cut(self, int v):
        self._check(v)
        self._access(v)
        cdef int lo = self.left[v]
        if lo == NONE:
            raise ForestError(f"node {v} has no parent")
        self.par[lo] = NONE
        self.left[v] = NONE
        self._pull(v)

    cpdef int parent(self, int v) except -2:
        self._check(v)
        self._access(v)
        cdef int t = self.left[v]
        if t == NONE:
            return NONE
        while self.right[t] != NONE:
            t = self.right[t]
        self._splay(t)
        return t

    cpdef int count_leaves(self, int v) except -2:
        self._check(v)
        self._access(v)
        return self.agg[v]

    cpdef int subtree_leaves(self, int v) except -2:
        self._check(v)
        self._access(v)
        return self.own[v]

    cpdef int lca_raw(self, int u, int v) except -2:
        self._check(u)
        self._check(v)
        if u == v:
            return u
        self._access(u)
        cdef int w = self._access(v)
        if w == u:
            return u
        self._splay(u)
        return w if self.par[u] != NONE else NONE

    cpdef int lca_ext_raw(self, int u, int v) except -2:
        self._check(u)
        self._check(v)
        self._access(v)
        cdef int last = NONE
        cdef int top = NONE
        cdef int y = u
        cdef int r
        while y != NONE:
            self._splay(y)
            if self.par[y] == NONE and last != NONE:
                last = self._leftmost(last)
                top = last
            r = self.right[y]
            if r != NONE:
                self.own[y] += self.agg[r]
            if last != NONE:
                self.own[y] -= self.agg[last]
            self.right[y] = last
            self._pull(y)
            last = y
            y = self.par[y]
        self._splay(u)
        return top

    def state(self):
        return (list(self.left), list(self.right), list(self.par),
                list(self.own), list(self.agg), list(self.leaf))
