"""Vectorized numpy implementations of the hot kernels.

Every function here has a twin with the same signature and output in
``_numba``; the equivalence is enforced by the test suite.
"""

import numpy as np


def canonical_blocks(blocks):
    """Relabel block ids in order of first occurrence."""
    blocks = np.asarray(blocks, dtype=np.int64)
    if blocks.size == 0:
        return blocks.copy()
    _, first, inv = np.unique(blocks, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv.ravel()]


def refine_partition(n, src, ev, dst, n_events, blocks):
    """Coarsest stable refinement of ``blocks`` (strong bisimulation).

    Each round groups states by (current block, set of (event, target
    block)) signatures, compared exactly as padded rows.
    """
    blocks = canonical_blocks(blocks)
    if n == 0:
        return blocks
    src = np.asarray(src, dtype=np.int64)
    ev = np.asarray(ev, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    while True:
        nb = int(blocks.max()) + 1
        codes = ev * nb + blocks[dst]
        order = np.lexsort((codes, src))
        s, c = src[order], codes[order]
        if s.size:
            keep = np.ones(s.size, dtype=bool)
            keep[1:] = (s[1:] != s[:-1]) | (c[1:] != c[:-1])
            s, c = s[keep], c[keep]
        deg = np.bincount(s, minlength=n)
        width = int(deg.max()) if deg.size else 0
        rows = np.full((n, width + 1), -1, dtype=np.int64)
        rows[:, 0] = blocks
        if s.size:
            starts = np.cumsum(deg) - deg
            pos = np.arange(s.size) - starts[s]
            rows[s, pos + 1] = c
        _, inv = np.unique(rows, axis=0, return_inverse=True)
        new = canonical_blocks(inv.ravel())
        if new.max() == blocks.max():
            return new
        blocks = new


def _group_or(values, keys, axis):
    """OR-reduce ``values`` along ``axis`` over runs of equal (sorted) ``keys``."""
    uniq, starts = np.unique(keys, return_index=True)
    return uniq, np.logical_or.reduceat(values, starts, axis=axis)


def greatest_simulation(n1, src1, ev1, dst1, n2, src2, ev2, dst2, n_events):
    """Boolean matrix ``S[p, q]``: state ``q`` of A2 simulates state ``p`` of A1.

    Jacobi-style iteration of the simulation step condition, one event at a
    time, until nothing is removed.
    """
    src1, ev1, dst1 = (np.asarray(a, dtype=np.int64) for a in (src1, ev1, dst1))
    src2, ev2, dst2 = (np.asarray(a, dtype=np.int64) for a in (src2, ev2, dst2))
    S = np.ones((n1, n2), dtype=bool)
    per_event = []
    for e in range(n_events):
        m1 = ev1 == e
        if not m1.any():
            continue
        o1 = np.argsort(src1[m1], kind="stable")
        m2 = ev2 == e
        o2 = np.argsort(src2[m2], kind="stable")
        per_event.append((src1[m1][o1], dst1[m1][o1], src2[m2][o2], dst2[m2][o2]))
    while True:
        viol = np.zeros((n1, n2), dtype=bool)
        for ps, pd, qs, qd in per_event:
            matched = np.zeros((n1, n2), dtype=bool)
            if qs.size:
                uq, red = _group_or(S[:, qd], qs, axis=1)
                matched[:, uq] = red
            up, red = _group_or(~matched[pd], ps, axis=0)
            viol[up] |= red
        newS = S & ~viol
        if np.array_equal(newS, S):
            return S
        S = newS


def dc3_search(delta, kind, comp, a, roots, max_codes):
    """Breadth-first search for illegal cross interleavings.

    A configuration ``(phase, x, y, z)`` tracks agent 1 walking a string
    ``s`` of the automaton (``x``), agent 2 walking ``s'`` (``y``) and the
    state ``z`` reached by the interleaving of ``p1(s)`` with ``p2(s')``
    emitted so far. ``phase`` 0 means the common event ``a`` has not been
    synchronised yet; in that phase only private moves and the ``a`` sync
    are allowed and both walkers must still be able to reach ``a``.

    Move ids: ``e`` agent 1 on event e, ``m + e`` agent 2, ``2m + e`` a
    synchronised common event. Returns the visited configurations in
    canonical BFS order (codes, parent index, move) and the list of moves
    that would emit an event undefined at ``z``, as (parent index, move).
    """
    delta = np.asarray(delta, dtype=np.int64)
    n, m = delta.shape
    if 2 * n * n * n > max_codes:
        raise MemoryError("configuration space too large")
    kind = np.asarray(kind, dtype=np.int64)
    comp = np.asarray(comp, dtype=bool)
    visited = np.zeros(2 * n * n * n, dtype=bool)

    roots = np.asarray(roots, dtype=np.int64)
    level = roots * (n * n + n + 1)
    visited[level] = True
    all_codes = [level]
    all_parent = [np.full(level.size, -1, dtype=np.int64)]
    all_move = [np.full(level.size, -1, dtype=np.int64)]
    bad_parent = []
    bad_move = []
    base = 0
    nn = n * n
    while level.size:
        ph = level // (n * nn)
        x = (level // nn) % n
        y = (level // n) % n
        z = level % n
        pos = base + np.arange(level.size, dtype=np.int64)
        cand_code, cand_parent, cand_move = [], [], []
        for e in range(m):
            k = kind[e]
            if k == 3:
                continue
            for agent in (1, 2):
                mover = x if agent == 1 else y
                t = delta[mover, e]
                ok = t >= 0
                if not ok.any():
                    continue
                silent = (k == 2) if agent == 1 else (k == 1)
                tt = np.where(ok, t, 0)
                ok &= (ph == 1) | comp[tt]
                if silent:
                    z2 = z
                else:
                    z2 = delta[z, e]
                mv = e if agent == 1 else m + e
                bad = ok & (z2 < 0)
                if bad.any():
                    bad_parent.append(pos[bad])
                    bad_move.append(np.full(int(bad.sum()), mv, dtype=np.int64))
                good = ok & (z2 >= 0)
                if good.any():
                    t_g = t[good]
                    if agent == 1:
                        code = ((ph[good] * n + t_g) * n + y[good]) * n + z2[good]
                    else:
                        code = ((ph[good] * n + x[good]) * n + t_g) * n + z2[good]
                    cand_code.append(code)
                    cand_parent.append(pos[good])
                    cand_move.append(np.full(code.size, mv, dtype=np.int64))
        for e in range(m):
            if kind[e] != 3:
                continue
            tx = delta[x, e]
            ty = delta[y, e]
            ok = (tx >= 0) & (ty >= 0)
            if e != a:
                ok &= ph == 1
            if not ok.any():
                continue
            z2 = delta[z, e]
            mv = 2 * m + e
            bad = ok & (z2 < 0)
            if bad.any():
                bad_parent.append(pos[bad])
                bad_move.append(np.full(int(bad.sum()), mv, dtype=np.int64))
            good = ok & (z2 >= 0)
            if good.any():
                code = ((1 * n + tx[good]) * n + ty[good]) * n + z2[good]
                cand_code.append(code)
                cand_parent.append(pos[good])
                cand_move.append(np.full(code.size, mv, dtype=np.int64))
        if not cand_code:
            break
        code = np.concatenate(cand_code)
        parent = np.concatenate(cand_parent)
        move = np.concatenate(cand_move)
        fresh = ~visited[code]
        code, parent, move = code[fresh], parent[fresh], move[fresh]
        order = np.lexsort((move, parent, code))
        code, parent, move = code[order], parent[order], move[order]
        first = np.ones(code.size, dtype=bool)
        first[1:] = code[1:] != code[:-1]
        code, parent, move = code[first], parent[first], move[first]
        visited[code] = True
        base += level.size
        level = code
        all_codes.append(code)
        all_parent.append(parent)
        all_move.append(move)

    if bad_parent:
        bp = np.concatenate(bad_parent)
        bm = np.concatenate(bad_move)
        order = np.lexsort((bm, bp))
        bp, bm = bp[order], bm[order]
    else:
        bp = np.empty(0, dtype=np.int64)
        bm = np.empty(0, dtype=np.int64)
    return (
        np.concatenate(all_codes),
        np.concatenate(all_parent),
        np.concatenate(all_move),
        bp,
        bm,
    )
