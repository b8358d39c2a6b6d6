"""numba kernels: exhaustive k-subset scans over packed adjacency words.

Subsets are visited in lexicographic order.  For a set S the running AND of
its rows is C(S), the vertices adjacent to all of S (S itself never appears
in C(S) because rows have no loops).  For the tuple statistics the per-vertex
sets D(v) = N(v) & C(S) decide everything:

* Y: {v1, v2} qualifies iff D(v1) <= {v2} and D(v2) <= {v1};
* Z: ({v1, v2}, v3) qualifies iff D(v3) <= {v1, v2} and D(v1) & D(v2) <= {v3}.
"""

import numba
import numpy as np

KIND_X, KIND_Y, KIND_Z = 0, 1, 2

_U1 = np.uint64(1)
_U0 = np.uint64(0)


@numba.njit(cache=True)
def popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@numba.njit(cache=True)
def _has(words_row, v):
    return (words_row[v >> 6] >> np.uint64(v & 63)) & _U1


@numba.njit(cache=True)
def _single(bits, nw):
    """Index of the only set bit, -1 if none, -2 if more than one."""
    found = -1
    for w in range(nw):
        b = bits[w]
        if b != 0:
            if found != -1 or (b & (b - _U1)) != 0:
                return -2
            t = 0
            while (b >> np.uint64(t)) & _U1 == 0:
                t += 1
            found = 64 * w + t
    return found


@numba.njit(cache=True)
def _fill_d(words, n, common, inset, d, pc):
    nw = words.shape[1]
    for v in range(n):
        if inset[v]:
            pc[v] = -1
            continue
        total = 0
        for w in range(nw):
            d[v, w] = words[v, w] & common[w]
            total += popcount(d[v, w])
        pc[v] = total


@numba.njit(cache=True)
def _meet_within(d, a, b, allowed, nw):
    """D(a) & D(b) is empty or equal to {allowed}."""
    for w in range(nw):
        m = d[a, w] & d[b, w]
        if allowed >= 0 and (allowed >> 6) == w:
            m &= ~(_U1 << np.uint64(allowed & 63))
        if m != 0:
            return False
    return True


@numba.njit(cache=True)
def _count_y_pairs(words, n, d, pc, inset, first, want_first):
    """Qualifying {v1, v2} for one set; first qualifying pair stored in ``first``."""
    nw = words.shape[1]
    free = 0
    total = 0
    first[0] = -1
    for v in range(n):
        if inset[v] or pc[v] > 1:
            continue
        if pc[v] == 0:
            free += 1
            continue
        u = _single(d[v], nw)
        if pc[u] == 0:
            total += 1
        elif pc[u] == 1 and v < u and _has(d[u], v):
            total += 1
    total += free * (free - 1) // 2
    if total > 0 and want_first:
        # lexicographically first pair, found by direct search
        for a in range(n):
            if inset[a] or pc[a] > 1:
                continue
            for b in range(a + 1, n):
                if inset[b] or pc[b] > 1:
                    continue
                ok_a = pc[a] == 0 or (pc[a] == 1 and _has(d[a], b))
                ok_b = pc[b] == 0 or (pc[b] == 1 and _has(d[b], a))
                if ok_a and ok_b:
                    first[0] = a
                    first[1] = b
                    return total
    return total


@numba.njit(cache=True)
def _count_z_tuples(words, n, d, pc, inset):
    nw = words.shape[1]
    total = 0
    for v3 in range(n):
        if inset[v3] or pc[v3] > 2:
            continue
        if pc[v3] == 2:
            a = -1
            b = -1
            for x in range(n):
                if _has(d[v3], x):
                    if a < 0:
                        a = x
                    else:
                        b = x
            if _meet_within(d, a, b, v3, nw):
                total += 1
        elif pc[v3] == 1:
            a = _single(d[v3], nw)
            for b in range(n):
                if inset[b] or b == v3 or b == a:
                    continue
                if _meet_within(d, a, b, v3, nw):
                    total += 1
        else:
            for a in range(n):
                if inset[a] or a == v3:
                    continue
                for b in range(a + 1, n):
                    if inset[b] or b == v3:
                        continue
                    if _meet_within(d, a, b, v3, nw):
                        total += 1
    return total


@numba.njit(cache=True)
def _pair_shift(k):
    m = k * (k - 1) // 2
    shift = np.zeros((k, k), dtype=np.int64)
    p = 0
    for a in range(k):
        for b in range(a + 1, k):
            shift[a, b] = m - 1 - p
            p += 1
    return shift


@numba.njit(cache=True, nogil=True)
def scan(words, n, k, kind, rank, mu, max_edges, hist, first_order, first_tuple):
    """Exhaustive scan of k-subsets; returns the ``kind`` statistic.

    Sets whose labelled pattern code has ``rank[code] > mu`` are skipped, and
    partial sets with more than ``max_edges`` edges are pruned with their
    whole subtree.
    When ``hist`` is non-empty, each set contributing at least one tuple
    increments ``hist[code]``, and the first such set per code is kept in
    ``first_order``/``first_tuple`` (S followed by v1, v2 for kind Y).
    """
    nw = words.shape[1]
    record = hist.shape[0] > 0
    shift = _pair_shift(k)
    inter = np.zeros((k + 1, nw), dtype=np.uint64)
    for w in range(nw):
        lo = 64 * w
        if n - lo >= 64:
            inter[0, w] = ~_U0
        elif n > lo:
            inter[0, w] = (_U1 << np.uint64(n - lo)) - _U1
    codes = np.zeros(k + 1, dtype=np.int64)
    union = np.zeros((k + 1, nw), dtype=np.uint64)
    saturated = np.zeros(k + 1, dtype=np.bool_)
    idx = np.zeros(k, dtype=np.int64)
    inset = np.zeros(n, dtype=np.bool_)
    d = np.zeros((n, nw), dtype=np.uint64)
    pc = np.zeros(n, dtype=np.int64)
    pair = np.full(2, -1, dtype=np.int64)
    total = 0
    order = 0
    if k == 0 or k > n:
        return 0
    j = 0
    idx[0] = 0
    while j >= 0:
        if idx[j] > n - (k - j):
            j -= 1
            if j >= 0:
                idx[j] += 1
            continue
        v = idx[j]
        if saturated[j] and _has(union[j], v):
            # any edge to the set would exceed max_edges
            idx[j] += 1
            continue
        c = codes[j]
        for i in range(j):
            if _has(words[idx[i]], v):
                c += np.int64(1) << shift[i, j]
        if popcount(np.uint64(c)) > max_edges:
            idx[j] += 1
            continue
        codes[j + 1] = c
        saturated[j + 1] = popcount(np.uint64(c)) == max_edges
        for w in range(nw):
            inter[j + 1, w] = inter[j, w] & words[v, w]
            union[j + 1, w] = union[j, w] | words[v, w]
        if j < k - 1:
            j += 1
            idx[j] = idx[j - 1] + 1
            continue
        # a full k-set
        code = codes[k]
        if rank[code] <= mu:
            contrib = 0
            if kind == 0:
                contrib = 1
                for w in range(nw):
                    if inter[k, w] != 0:
                        contrib = 0
            else:
                for t in range(k):
                    inset[idx[t]] = True
                _fill_d(words, n, inter[k], inset, d, pc)
                if kind == 1:
                    contrib = _count_y_pairs(words, n, d, pc, inset, pair, record)
                else:
                    contrib = _count_z_tuples(words, n, d, pc, inset)
                for t in range(k):
                    inset[idx[t]] = False
            total += contrib
            if record and contrib > 0:
                if hist[code] == 0:
                    first_order[code] = order
                    for t in range(k):
                        first_tuple[code, t] = idx[t]
                    if kind == 1:
                        first_tuple[code, k] = pair[0]
                        first_tuple[code, k + 1] = pair[1]
                hist[code] += 1
        order += 1
        idx[j] += 1
    return total
