"""Pure-Python radix/version kernels used by the level-phase identifier pass."""

from __future__ import annotations


def counting_sort(keys, base: int, order=None) -> list[int]:
    """Stable sort of ``order`` (default ``0..len(keys)-1``) by ``keys[i]``.

    Keys must lie in ``[0, base)``.
    """
    if order is None:
        order = range(len(keys))
    count = [0] * (base + 1)
    for i in order:
        count[keys[i] + 1] += 1
    for b in range(base):
        count[b + 1] += count[b]
    out = [0] * len(order)
    for i in order:
        k = keys[i]
        out[count[k]] = i
        count[k] += 1
    return out


def propagate_versions(pos, grp, height: int) -> tuple[list[int], int]:
    """Identify prefix sets bottom-up through the implicit complete tree.

    Records ``j`` are elements ``pos[j]`` (leaf positions) of the prefix
    sequences ``grp[j]``, listed in (group, prefix length) order.  At height
    ``h`` record ``j`` is the version of node ``pos[j] >> h`` created by that
    element; its identifier is the identifier of the pair (left child version,
    right child version) current at the same prefix length, found by
    radix-sorting all pairs of the depth.  Returns the root-level identifier
    of every record and the number of distinct root identifiers.
    """
    m = len(pos)
    cur = [1] * m
    distinct = 1 if m else 0
    lo = [0] * m
    hi = [0] * m
    for h in range(1, height + 1):
        ukey = [p >> h for p in pos]
        perm = counting_sort(ukey, (max(ukey) + 1) if m else 1)
        prev_u = prev_g = -1
        last_l = last_r = 0
        for j in range(m):
            i = perm[j]
            u = ukey[i]
            g = grp[i]
            if u != prev_u or g != prev_g:
                prev_u, prev_g = u, g
                last_l = last_r = 0
            if (pos[i] >> (h - 1)) & 1:
                last_r = cur[i]
            else:
                last_l = cur[i]
            lo[j] = last_l
            hi[j] = last_r
        base = distinct + 1
        by_pair = counting_sort(lo, base, counting_sort(hi, base))
        new = [0] * m
        nid = 0
        pl = pr = -1
        for j in by_pair:
            a = lo[j]
            b = hi[j]
            if a != pl or b != pr:
                nid += 1
                pl, pr = a, b
            new[perm[j]] = nid
        cur = new
        distinct = nid
    return cur, distinct


FULL, EMPTY, MIXED = 0, 1, 2


class GroupStore:
    """Full/empty/mixed child groups of every boundary node's finger.

    Groups are integer bitmasks over consensus-tree node ids, with per-group
    counts and leaf sums kept alongside.
    """

    def __init__(self, count: int, capacity: int):
        self.capacity = capacity
        self.masks = [[0] * count for _ in range(3)]
        self.counts = [[0] * count for _ in range(3)]
        self.sums = [[0] * count for _ in range(3)]

    def init_group(self, bw: int, full: int, empty: int) -> None:
        for g, m in ((FULL, full), (EMPTY, empty), (MIXED, 0)):
            self.masks[g][bw] = m
            self.counts[g][bw] = self.sums[g][bw] = m.bit_count()

    def tag(self, bw: int, c: int) -> int:
        for g in (FULL, EMPTY, MIXED):
            if (self.masks[g][bw] >> c) & 1:
                return g
        return -1

    def is_empty(self, bw: int, c: int) -> bool:
        return bool((self.masks[EMPTY][bw] >> c) & 1)

    def count(self, bw: int, g: int) -> int:
        return self.counts[g][bw]

    def total(self, bw: int, g: int) -> int:
        return self.sums[g][bw]

    def members(self, bw: int, g: int) -> list[int]:
        out = []
        m = self.masks[g][bw]
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return out

    def rename(self, bws, old: int, new: int) -> None:
        swap = (1 << old) | (1 << new)
        for bw in bws:
            for g in (FULL, EMPTY, MIXED):
                if (self.masks[g][bw] >> old) & 1:
                    self.masks[g][bw] ^= swap
                    break

    def split(self, movers, side, size, side_is_reconnect: bool, lower: int,
              usize: int) -> list[bool]:
        """Refresh groups after the finger's children split into ``C_r`` and the rest.

        ``side`` is whichever part was physically moved.  A boundary node
        moves down to ``lower`` (the node now holding ``C_r``) iff nothing
        outside ``C_r`` is full or mixed; otherwise it stays up and ``lower``
        joins its groups.  Returns the move-down flag per boundary node.
        """
        side_mask = 0
        for c in side:
            side_mask |= 1 << c
        keep_mask = ~side_mask
        fm, em, mm = self.masks
        counts, sums = self.counts, self.sums
        out = []
        for bw in movers:
            F, E, M = fm[bw], em[bw], mm[bw]
            sc = [0, 0, 0]
            ss = [0, 0, 0]
            for c in side:
                g = FULL if (F >> c) & 1 else MIXED if (M >> c) & 1 else EMPTY
                sc[g] += 1
                ss[g] += size[c]
            other_c = [counts[g][bw] - sc[g] for g in range(3)]
            other_s = [sums[g][bw] - ss[g] for g in range(3)]
            if side_is_reconnect:
                cr_c, cr_s, rest_c, rest_s = sc, ss, other_c, other_s
            else:
                cr_c, cr_s, rest_c, rest_s = other_c, other_s, sc, ss
            down = rest_c[FULL] + rest_c[MIXED] == 0
            if down:
                part = side_mask if side_is_reconnect else keep_mask
                new_c, new_s = cr_c, cr_s
            else:
                part = keep_mask if side_is_reconnect else side_mask
                new_c, new_s = list(rest_c), list(rest_s)
            F, E, M = F & part, E & part, M & part
            if not down:
                bit = 1 << lower
                if cr_c[EMPTY] + cr_c[MIXED] == 0:
                    g = FULL
                    F |= bit
                elif cr_c[FULL] + cr_c[MIXED] == 0:
                    g = EMPTY
                    E |= bit
                else:
                    g = MIXED
                    M |= bit
                new_c[g] += 1
                new_s[g] += usize
            fm[bw], em[bw], mm[bw] = F, E, M
            for g in range(3):
                counts[g][bw] = new_c[g]
                sums[g][bw] = new_s[g]
            out.append(down)
        return out

    def snapshot(self, bw: int) -> tuple[tuple, tuple, tuple]:
        return (tuple(self.masks[g][bw] for g in range(3)),
                tuple(self.counts[g][bw] for g in range(3)),
                tuple(self.sums[g][bw] for g in range(3)))


def frequent_flags(masks: list[int], freq: list[int]) -> list[bool]:
    """``flags[i]``: every cluster incompatible with ``masks[i]`` is strictly rarer.

    Only clusters at least as frequent can disqualify ``i``, so each scan
    runs over the frequency-descending prefix and stops at the first conflict.
    """
    m = len(masks)
    order = sorted(range(m), key=lambda i: -freq[i])
    flags = [True] * m
    end = 0
    for pos, i in enumerate(order):
        f = freq[i]
        while end < m and freq[order[end]] >= f:
            end += 1
        a = masks[i]
        for q in range(end):
            b = masks[order[q]]
            inter = a & b
            if inter and inter != a and inter != b:
                flags[i] = False
                break
    return flags
