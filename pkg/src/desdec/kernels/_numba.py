"""numba-compiled twins of the kernels in ``_numpy``.

Same signatures, same outputs (including ordering); loops instead of
vectorized gathers.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def canonical_blocks(blocks):
    n = blocks.size
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    remap = np.full(blocks.max() + 1, -1, dtype=np.int64)
    nxt = 0
    for i in range(n):
        b = blocks[i]
        if remap[b] < 0:
            remap[b] = nxt
            nxt += 1
        out[i] = remap[b]
    return out


@njit(cache=True)
def _csr(n, src):
    off = np.zeros(n + 1, dtype=np.int64)
    for k in range(src.size):
        off[src[k] + 1] += 1
    for i in range(n):
        off[i + 1] += off[i]
    return off, np.argsort(src, kind="mergesort")


@njit(cache=True)
def _same_signature(a, b, blocks, codes, off):
    if blocks[a] != blocks[b]:
        return False
    i, j = off[a], off[b]
    ia, jb = off[a + 1], off[b + 1]
    while True:
        # skip duplicates so both sides are compared as sets
        while i < ia and i > off[a] and codes[i] == codes[i - 1]:
            i += 1
        while j < jb and j > off[b] and codes[j] == codes[j - 1]:
            j += 1
        if i == ia or j == jb:
            return i == ia and j == jb
        if codes[i] != codes[j]:
            return False
        i += 1
        j += 1


@njit(cache=True)
def refine_partition(n, src, ev, dst, n_events, blocks):
    blocks = canonical_blocks(blocks)
    if n == 0:
        return blocks
    m = src.size
    off, order = _csr(n, src)
    s_ev = ev[order]
    s_dst = dst[order]
    nb = blocks.max() + 1
    codes = np.empty(m, dtype=np.int64)
    h = np.empty(n, dtype=np.uint64)
    reps = np.empty(n, dtype=np.int64)
    while True:
        for k in range(m):
            codes[k] = s_ev[k] * nb + blocks[s_dst[k]]
        for i in range(n):
            codes[off[i]:off[i + 1]] = np.sort(codes[off[i]:off[i + 1]])
        for i in range(n):
            x = np.uint64(14695981039346656037) ^ np.uint64(blocks[i])
            x = x * np.uint64(1099511628211)
            for k in range(off[i], off[i + 1]):
                if k > off[i] and codes[k] == codes[k - 1]:
                    continue
                x = (x ^ np.uint64(codes[k])) * np.uint64(1099511628211)
            h[i] = x
        perm = np.argsort(h, kind="mergesort")
        newb = np.empty(n, dtype=np.int64)
        next_id = 0
        i = 0
        while i < n:
            j = i
            while j < n and h[perm[j]] == h[perm[i]]:
                j += 1
            nrep = 0
            for t in range(i, j):
                s = perm[t]
                found = False
                for r in range(nrep):
                    if _same_signature(s, reps[r], blocks, codes, off):
                        newb[s] = newb[reps[r]]
                        found = True
                        break
                if not found:
                    newb[s] = next_id
                    next_id += 1
                    reps[nrep] = s
                    nrep += 1
            i = j
        newb = canonical_blocks(newb)
        if newb.max() + 1 == nb:
            return newb
        blocks = newb
        nb = newb.max() + 1


@njit(cache=True)
def greatest_simulation(n1, src1, ev1, dst1, n2, src2, ev2, dst2, n_events):
    off1, o1 = _csr(n1, src1)
    e1 = ev1[o1]
    d1 = dst1[o1]
    off2, o2 = _csr(n2, src2)
    e2 = ev2[o2]
    d2 = dst2[o2]
    S = np.ones((n1, n2), dtype=np.bool_)
    changed = True
    while changed:
        changed = False
        for p in range(n1):
            for q in range(n2):
                if not S[p, q]:
                    continue
                for k in range(off1[p], off1[p + 1]):
                    e = e1[k]
                    pp = d1[k]
                    matched = False
                    for l in range(off2[q], off2[q + 1]):
                        if e2[l] == e and S[pp, d2[l]]:
                            matched = True
                            break
                    if not matched:
                        S[p, q] = False
                        changed = True
                        break
    return S


@njit(cache=True)
def _grow(arr, cap):
    out = np.empty(cap, dtype=arr.dtype)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def dc3_search(delta, kind, comp, a, roots, max_codes):
    n, m = delta.shape
    nn = n * n
    total = 2 * nn * n
    if total > max_codes:
        raise MemoryError("configuration space too large")
    visited = np.zeros(total, dtype=np.uint8)

    cap = max(1024, 4 * roots.size)
    codes = np.empty(cap, dtype=np.int64)
    parent = np.empty(cap, dtype=np.int64)
    move = np.empty(cap, dtype=np.int64)
    cnt = 0
    for r in roots:
        c = r * (nn + n + 1)
        visited[c] = 1
        codes[cnt] = c
        parent[cnt] = -1
        move[cnt] = -1
        cnt += 1
    bcap = 1024
    bp = np.empty(bcap, dtype=np.int64)
    bm = np.empty(bcap, dtype=np.int64)
    bcnt = 0

    lo = 0
    hi = cnt
    while lo < hi:
        for p in range(lo, hi):
            c = codes[p]
            ph = c // (n * nn)
            x = (c // nn) % n
            y = (c // n) % n
            z = c % n
            for agent in range(3):
                for e in range(m):
                    k = kind[e]
                    if agent < 2:
                        if k == 3:
                            continue
                        t = delta[x, e] if agent == 0 else delta[y, e]
                        if t < 0:
                            continue
                        if ph == 0 and not comp[t]:
                            continue
                        silent = (k == 2) if agent == 0 else (k == 1)
                        z2 = z if silent else delta[z, e]
                        if agent == 0:
                            nc = ((ph * n + t) * n + y) * n + z2
                        else:
                            nc = ((ph * n + x) * n + t) * n + z2
                    else:
                        if k != 3:
                            continue
                        if ph == 0 and e != a:
                            continue
                        tx = delta[x, e]
                        ty = delta[y, e]
                        if tx < 0 or ty < 0:
                            continue
                        z2 = delta[z, e]
                        nc = ((n + tx) * n + ty) * n + z2
                    mv = agent * m + e
                    if z2 < 0:
                        if bcnt == bcap:
                            bcap *= 2
                            bp = _grow(bp, bcap)
                            bm = _grow(bm, bcap)
                        bp[bcnt] = p
                        bm[bcnt] = mv
                        bcnt += 1
                        continue
                    if visited[nc] == 0:
                        visited[nc] = 1
                        if cnt == cap:
                            cap *= 2
                            codes = _grow(codes, cap)
                            parent = _grow(parent, cap)
                            move = _grow(move, cap)
                        codes[cnt] = nc
                        parent[cnt] = p
                        move[cnt] = mv
                        cnt += 1
        order = np.argsort(codes[hi:cnt])
        codes[hi:cnt] = codes[hi:cnt][order]
        parent[hi:cnt] = parent[hi:cnt][order]
        move[hi:cnt] = move[hi:cnt][order]
        lo = hi
        hi = cnt
    return codes[:cnt].copy(), parent[:cnt].copy(), move[:cnt].copy(), bp[:bcnt].copy(), bm[:bcnt].copy()
