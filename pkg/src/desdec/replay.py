"""Independent re-validation of decomposability witnesses.

Nothing here calls into :mod:`desdec.decompose`, :mod:`desdec.compose` or
the kernels: runs, reachability and projections are recomputed with plain
set manipulation so a replayed witness is evidence, not an echo.
"""

from __future__ import annotations


def _succ(A):
    out = {}
    for s, e, d in A.transitions:
        out.setdefault(s, {}).setdefault(e, set()).add(d)
    return out


def _run(succ, states, s):
    cur = set(states)
    for e in s:
        cur = {t for q in cur for t in succ.get(q, {}).get(e, ())}
        if not cur:
            return cur
    return cur


def _defined(A, q, s, succ=None):
    return bool(_run(succ or _succ(A), {q}, s))


def _reachable(A):
    succ = _succ(A)
    seen = {A.initial}
    stack = [A.initial]
    while stack:
        q = stack.pop()
        for ts in succ.get(q, {}).values():
            for t in ts:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen


def _proj(s, E):
    return tuple(e for e in s if e in E)


def _is_prefix(u, v):
    return len(u) <= len(v) and tuple(v[: len(u)]) == tuple(u)


def _first_common(s, common):
    return next((e for e in s if e in common), None)


def local_projection(A, E):
    """Naive quotient of the reachable part of ``A`` by tau-connectivity.

    Returns ``(initial_name, successor_map)``; names follow the sorted-"+"
    convention so witness states can be looked up.
    """
    reach = _reachable(A)
    cls = {q: frozenset([q]) for q in reach}
    for s, e, d in A.transitions:
        if s in reach and e not in E and cls[s] is not cls[d]:
            merged = cls[s] | cls[d]
            for q in merged:
                cls[q] = merged
    name = {q: "+".join(sorted(c)) for q, c in cls.items()}
    succ = {}
    for s, e, d in A.transitions:
        if s in reach and e in E:
            succ.setdefault(name[s], {}).setdefault(e, set()).add(name[d])
    init = name[A.initial]
    # keep only the part reachable from the initial class
    seen = {init}
    stack = [init]
    while stack:
        x = stack.pop()
        for ts in succ.get(x, {}).values():
            for t in ts:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return init, {x: m for x, m in succ.items() if x in seen}, seen


def replay(A, E1, E2, w) -> bool:
    """True iff witness ``w`` demonstrates the violation it claims."""
    E1, E2 = frozenset(E1), frozenset(E2)
    common = E1 & E2
    succ = _succ(A)
    reach = _reachable(A)
    cond = w.condition

    if cond == "ORACLE":
        if not w.strings:
            return False
        (t,) = w.strings
        in_a = _defined(A, A.initial, t, succ)
        in_comp = True
        for E in (E1, E2):
            init, psucc, _ = local_projection(A, E)
            in_comp &= bool(_run(psucc, {init}, _proj(t, E)))
        return in_a != in_comp

    if cond == "DC4":
        E = E1 if w.agent == 1 else E2 if w.agent == 2 else None
        if E is None or len(w.events) != 1 or len(w.strings) != 1 or len(w.targets) != 2:
            return False
        init, psucc, preach = local_projection(A, E)
        x, (e,), (t,) = w.state, w.events, w.strings
        x1, x2 = w.targets
        if x not in preach or x1 == x2 or e not in E or not set(t) <= E:
            return False
        targets = psucc.get(x, {}).get(e, set())
        if x1 not in targets or x2 not in targets:
            return False
        return bool(_run(psucc, {x1}, t)) != bool(_run(psucc, {x2}, t))

    q = w.state
    if q not in reach:
        return False

    if cond == "DC1":
        if len(w.events) != 2:
            return False
        e1, e2 = w.events
        if e1 not in E1 - E2 or e2 not in E2 - E1:
            return False
        if not (_defined(A, q, (e1,), succ) and _defined(A, q, (e2,), succ)):
            return False
        return not (_defined(A, q, (e1, e2), succ) and _defined(A, q, (e2, e1), succ))

    if cond == "DC2":
        if len(w.events) != 2 or len(w.strings) != 1:
            return False
        e1, e2 = w.events
        if e1 not in E1 - E2 or e2 not in E2 - E1:
            return False
        (s,) = w.strings
        return _defined(A, q, (e1, e2) + s, succ) != _defined(A, q, (e2, e1) + s, succ)

    if cond == "DC3":
        if len(w.events) != 1 or len(w.strings) != 3:
            return False
        (a,) = w.events
        s, s2, word = w.strings
        if a not in common or s == s2:
            return False
        if _first_common(s, common) != a or _first_common(s2, common) != a:
            return False
        if not (_defined(A, q, s, succ) and _defined(A, q, s2, succ)):
            return False
        if not set(word) <= E1 | E2 or _defined(A, q, word, succ):
            return False
        pw1, pw2 = _proj(word, E1), _proj(word, E2)
        forward = _is_prefix(pw1, _proj(s, E1)) and _is_prefix(pw2, _proj(s2, E2))
        backward = _is_prefix(pw1, _proj(s2, E1)) and _is_prefix(pw2, _proj(s, E2))
        return forward or backward

    return False


def replay_all(A, E1, E2, witnesses) -> list:
    return [replay(A, E1, E2, w) for w in witnesses]
