# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled radix/version kernels; same surface as ``_kernels_py``."""

from libcpp.vector cimport vector


cdef void _csort(const int* keys, int base, const int* order, int m, int* out) noexcept nogil:
    cdef vector[int] count
    count.resize(base + 1, 0)
    cdef int j, k, b
    for j in range(m):
        count[keys[order[j]] + 1] += 1
    for b in range(base):
        count[b + 1] += count[b]
    for j in range(m):
        k = keys[order[j]]
        out[count[k]] = order[j]
        count[k] += 1


def counting_sort(keys, int base, order=None):
    cdef int m
    cdef vector[int] k = keys
    cdef vector[int] o
    if order is None:
        m = k.size()
        o.resize(m)
        for j in range(m):
            o[j] = j
    else:
        o = order
        m = o.size()
    cdef vector[int] out
    out.resize(m)
    if m:
        _csort(k.data(), base, o.data(), m, out.data())
    return out


def propagate_versions(pos, grp, int height):
    cdef vector[int] p = pos
    cdef vector[int] g = grp
    cdef int m = p.size()
    cdef vector[int] cur, new, ukey, ident, perm, lo, hi, tmp, by_pair
    cur.assign(m, 1)
    new.resize(m)
    ukey.resize(m)
    ident.resize(m)
    perm.resize(m)
    lo.resize(m)
    hi.resize(m)
    tmp.resize(m)
    by_pair.resize(m)
    cdef int distinct = 1 if m else 0
    cdef int h, j, i, u, gg, prev_u, prev_g, last_l, last_r, umax, nid, pl, pr, a, b
    for j in range(m):
        ident[j] = j
    with nogil:
        for h in range(1, height + 1):
            umax = 0
            for j in range(m):
                ukey[j] = p[j] >> h
                if ukey[j] > umax:
                    umax = ukey[j]
            if m:
                _csort(ukey.data(), umax + 1, ident.data(), m, perm.data())
            prev_u = -1
            prev_g = -1
            last_l = 0
            last_r = 0
            for j in range(m):
                i = perm[j]
                u = ukey[i]
                gg = g[i]
                if u != prev_u or gg != prev_g:
                    prev_u = u
                    prev_g = gg
                    last_l = 0
                    last_r = 0
                if (p[i] >> (h - 1)) & 1:
                    last_r = cur[i]
                else:
                    last_l = cur[i]
                lo[j] = last_l
                hi[j] = last_r
            if m:
                _csort(hi.data(), distinct + 1, ident.data(), m, tmp.data())
                _csort(lo.data(), distinct + 1, tmp.data(), m, by_pair.data())
            nid = 0
            pl = -1
            pr = -1
            for j in range(m):
                i = by_pair[j]
                a = lo[i]
                b = hi[i]
                if a != pl or b != pr:
                    nid += 1
                    pl = a
                    pr = b
                new[perm[i]] = nid
            cur.swap(new)
            distinct = nid
    return cur, distinct


from libc.stdint cimport uint64_t
from libc.string cimport memset


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    G_FULL = 0
    G_EMPTY = 1
    G_MIXED = 2


cdef class GroupStore:
    """C bitset version of the finger group store."""

    cdef vector[uint64_t] words
    cdef vector[long long] counts, sums
    cdef int n_words, n_groups
    cdef public int capacity

    def __cinit__(self, int count, int capacity):
        self.capacity = capacity
        self.n_groups = count
        self.n_words = (capacity + 63) // 64
        self.words.resize(<size_t>count * 3 * self.n_words, 0)
        self.counts.resize(<size_t>count * 3, 0)
        self.sums.resize(<size_t>count * 3, 0)

    cdef inline uint64_t* _row(self, int bw, int g) noexcept nogil:
        return &self.words[(<size_t>bw * 3 + g) * self.n_words]

    cdef inline int _tag(self, int bw, int c) noexcept nogil:
        cdef int g
        cdef uint64_t bit = (<uint64_t>1) << (c & 63)
        for g in range(3):
            if self._row(bw, g)[c >> 6] & bit:
                return g
        return -1

    cdef void _check(self, int bw, int c) except *:
        if bw < 0 or bw >= self.n_groups:
            raise IndexError(f"boundary index {bw} out of range")
        if c < 0 or c >= self.capacity:
            raise IndexError(f"node {c} outside capacity {self.capacity}")

    def init_group(self, int bw, full, empty):
        self._check(bw, 0)
        cdef int g, i
        cdef uint64_t* row
        cdef bytes raw
        cdef long long cnt
        for g, mask in ((G_FULL, full), (G_EMPTY, empty), (G_MIXED, 0)):
            if mask.bit_length() > self.capacity:
                raise ValueError("mask exceeds store capacity")
            raw = mask.to_bytes(self.n_words * 8, "little")
            row = self._row(bw, g)
            cnt = 0
            for i in range(self.n_words):
                row[i] = (<uint64_t*><char*>raw)[i]
                cnt += __builtin_popcountll(row[i])
            self.counts[bw * 3 + g] = cnt
            self.sums[bw * 3 + g] = cnt

    def tag(self, int bw, int c):
        self._check(bw, c)
        return self._tag(bw, c)

    def is_empty(self, int bw, int c):
        self._check(bw, c)
        return (self._row(bw, G_EMPTY)[c >> 6] >> (c & 63)) & 1 == 1

    def count(self, int bw, int g):
        return self.counts[bw * 3 + g]

    def total(self, int bw, int g):
        return self.sums[bw * 3 + g]

    def members(self, int bw, int g):
        self._check(bw, 0)
        cdef uint64_t* row = self._row(bw, g)
        cdef uint64_t w
        cdef int i
        out = []
        for i in range(self.n_words):
            w = row[i]
            while w:
                out.append(i * 64 + __builtin_ctzll(w))
                w &= w - 1
        return out

    def rename(self, bws, int old, int new):
        self._check(0, old)
        self._check(0, new)
        cdef int bw, g
        cdef uint64_t* row
        for bw in bws:
            g = self._tag(bw, old)
            if g >= 0:
                row = self._row(bw, g)
                row[old >> 6] &= ~((<uint64_t>1) << (old & 63))
                row[new >> 6] |= (<uint64_t>1) << (new & 63)

    def split(self, movers, side, size, bint side_is_reconnect, int lower, long long usize):
        cdef vector[int] sv = side
        cdef vector[long long] sz
        cdef vector[int] tags
        cdef int ns = sv.size()
        cdef int j, g, bw, c
        cdef long long sc[3]
        cdef long long ss[3]
        cdef long long oc[3]
        cdef long long os_[3]
        cdef long long* cr_c
        cdef long long* rest_c
        cdef long long* rest_s
        cdef long long* cr_s
        cdef uint64_t* row
        cdef bint down, rebuild
        cdef size_t base
        for j in range(ns):
            self._check(0, sv[j])
            sz.push_back(size[sv[j]])
        self._check(0, lower)
        tags.resize(ns)
        out = []
        for bw in movers:
            base = <size_t>bw * 3
            for g in range(3):
                sc[g] = 0
                ss[g] = 0
            for j in range(ns):
                g = self._tag(bw, sv[j])
                if g < 0:
                    g = G_EMPTY
                tags[j] = g
                sc[g] += 1
                ss[g] += sz[j]
            for g in range(3):
                oc[g] = self.counts[base + g] - sc[g]
                os_[g] = self.sums[base + g] - ss[g]
            if side_is_reconnect:
                cr_c = sc
                cr_s = ss
                rest_c = oc
                rest_s = os_
            else:
                cr_c = oc
                cr_s = os_
                rest_c = sc
                rest_s = ss
            down = rest_c[G_FULL] + rest_c[G_MIXED] == 0
            # keep the side's bits (rebuild from them) or drop them
            rebuild = down == side_is_reconnect
            if rebuild:
                for g in range(3):
                    memset(self._row(bw, g), 0, self.n_words * sizeof(uint64_t))
                for j in range(ns):
                    c = sv[j]
                    self._row(bw, tags[j])[c >> 6] |= (<uint64_t>1) << (c & 63)
            else:
                for j in range(ns):
                    c = sv[j]
                    self._row(bw, tags[j])[c >> 6] &= ~((<uint64_t>1) << (c & 63))
            if down:
                for g in range(3):
                    self.counts[base + g] = cr_c[g]
                    self.sums[base + g] = cr_s[g]
            else:
                for g in range(3):
                    self.counts[base + g] = rest_c[g]
                    self.sums[base + g] = rest_s[g]
                if cr_c[G_EMPTY] + cr_c[G_MIXED] == 0:
                    g = G_FULL
                elif cr_c[G_FULL] + cr_c[G_MIXED] == 0:
                    g = G_EMPTY
                else:
                    g = G_MIXED
                self._row(bw, g)[lower >> 6] |= (<uint64_t>1) << (lower & 63)
                self.counts[base + g] += 1
                self.sums[base + g] += usize
            out.append(down)
        return out

    def snapshot(self, int bw):
        self._check(bw, 0)
        masks = []
        cdef int g, i
        cdef uint64_t* row
        for g in range(3):
            row = self._row(bw, g)
            m = 0
            for i in range(self.n_words):
                if row[i]:
                    m |= (<object>row[i]) << (64 * i)
            masks.append(m)
        return (tuple(masks),
                tuple(self.counts[bw * 3 + g] for g in range(3)),
                tuple(self.sums[bw * 3 + g] for g in range(3)))



def frequent_flags(masks, freq):
    cdef int m = len(masks)
    if m == 0:
        return []
    cdef int nbits = max(x.bit_length() for x in masks)
    cdef int W = (nbits + 63) // 64
    cdef vector[uint64_t] words
    words.resize(<size_t>m * W, 0)
    cdef int i, j, q, end, w
    cdef bytes raw
    for i in range(m):
        raw = masks[i].to_bytes(W * 8, "little")
        for w in range(W):
            words[<size_t>i * W + w] = (<uint64_t*><char*>raw)[w]
    order = sorted(range(m), key=lambda x: -freq[x])
    cdef vector[int] ordv = order
    cdef vector[long long] fv = freq
    cdef vector[char] flags
    flags.resize(m, 1)
    cdef uint64_t *a
    cdef uint64_t *b
    cdef uint64_t x
    cdef bint sub_a, sub_b, meet
    end = 0
    with nogil:
        for j in range(m):
            i = ordv[j]
            while end < m and fv[ordv[end]] >= fv[i]:
                end += 1
            a = &words[<size_t>i * W]
            for q in range(end):
                b = &words[<size_t>ordv[q] * W]
                sub_a = True      # a within b
                sub_b = True      # b within a
                meet = False
                for w in range(W):
                    x = a[w] & b[w]
                    if x:
                        meet = True
                    if x != a[w]:
                        sub_a = False
                    if x != b[w]:
                        sub_b = False
                if meet and not sub_a and not sub_b:
                    flags[i] = 0
                    break
    return [bool(f) for f in flags]
