"""Two-agent decomposability: the conditions DC1-DC4 and the bisimulation oracle.

Every check takes a deterministic automaton ``A`` and two local event sets
whose union is exactly ``A.events``. Failed checks carry executable
:class:`Witness` objects; :mod:`desdec.replay` re-validates them without
using anything from this module.

DC3 is decided by an exact search over configurations of a product (see
:func:`desdec.kernels.dc3_search`) instead of enumerating strings; the
bounded string enumeration is kept only as a fallback.
"""

from __future__ import annotations

import dataclasses
import itertools
import os
from collections import deque

import numpy as np

from . import kernels
from .automaton import AlphabetSystem, Automaton, accessible, format_string, is_deterministic
from .compose import determinize, parallel, parallel_many, project_automaton, project_string
from .equivalence import bisimilar, distinguishing_string, simulates, state_blocks
from .errors import InternalConsistencyError, NondeterministicError

CONDITIONS = ("DC1", "DC2", "DC3", "DC4")
DEFAULT_DC3_LIMIT = 500_000_000
# bounded fallback enumeration
MAX_TRANSITION_USES = 2
MAX_PATHS = 300


def dc3_limit() -> int:
    raw = os.environ.get("DESDEC_DC3_LIMIT")
    return int(float(raw)) if raw else DEFAULT_DC3_LIMIT


@dataclasses.dataclass(frozen=True)
class Witness:
    """A concrete counterexample to one condition.

    ``strings`` holds the DC2 suffix ``s``, the DC3 triple ``(s, s', w)``
    (``w`` the illegal interleaving) or the DC4 continuation ``t``.
    For DC4, ``agent`` is 1 or 2 and ``targets`` the two ``e``-successors
    of ``state`` in that agent's projection.
    """

    condition: str
    state: str
    events: tuple = ()
    strings: tuple = ()
    agent: int | None = None
    targets: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "strings", tuple(tuple(s) for s in self.strings))
        object.__setattr__(self, "targets", tuple(self.targets))

    def to_dict(self) -> dict:
        d = {
            "condition": self.condition,
            "state": self.state,
            "events": list(self.events),
            "strings": [list(s) for s in self.strings],
        }
        if self.agent is not None:
            d["agent"] = self.agent
        if self.targets:
            d["targets"] = list(self.targets)
        return d

    @classmethod
    def from_dict(cls, d) -> Witness:
        return cls(
            d["condition"],
            d["state"],
            tuple(d.get("events", ())),
            tuple(tuple(s) for s in d.get("strings", ())),
            d.get("agent"),
            tuple(d.get("targets", ())),
        )

    def describe(self) -> str:
        parts = [f"{self.condition} at {self.state}"]
        if self.events:
            parts.append("events " + ", ".join(self.events))
        if self.agent is not None:
            parts.append(f"agent {self.agent}")
        if self.targets:
            parts.append("targets " + " / ".join(self.targets))
        if self.strings:
            labels = {"DC2": ("s",), "DC3": ("s", "s'", "w"), "DC4": ("t",), "ORACLE": ("w",)}.get(self.condition, ())
            strs = []
            for i, s in enumerate(self.strings):
                name = labels[i] if i < len(labels) else f"s{i}"
                strs.append(f"{name}={format_string(s)}")
            parts.append(" ".join(strs))
        return "; ".join(parts)


@dataclasses.dataclass(frozen=True)
class Verdict:
    holds: bool
    witnesses: tuple = ()
    exact: bool = True
    condition: str = ""
    checks: tuple = ()
    # False when exact condition checks disagree with the oracle
    consistent: bool = True

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        object.__setattr__(self, "checks", tuple(self.checks))
        if self.holds and self.witnesses:
            raise InternalConsistencyError("a holding verdict cannot carry witnesses")

    def __bool__(self):
        return self.holds

    def check(self, condition: str) -> Verdict | None:
        for c in self.checks:
            if c.condition == condition:
                return c
        return None

    @property
    def failed(self) -> tuple:
        return tuple(c.condition for c in self.checks if not c.holds)

    def to_dict(self) -> dict:
        d = {
            "condition": self.condition,
            "holds": self.holds,
            "exact": self.exact,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }
        if self.checks:
            d["checks"] = [c.to_dict() for c in self.checks]
        if not self.consistent:
            d["consistent"] = False
        return d


def _prepare(A: Automaton, E1, E2):
    E1, E2 = frozenset(E1), frozenset(E2)
    if not is_deterministic(A):
        raise NondeterministicError("decomposability checks need a deterministic automaton")
    AlphabetSystem((E1, E2)).check_cover(A)
    return accessible(A), E1, E2


def _private_pairs(A, q, E1, E2):
    en = A.successors[q]
    p1 = [e for e in sorted(E1 - E2) if e in en]
    p2 = [e for e in sorted(E2 - E1) if e in en]
    return en, p1, p2


def _next(A, q, e):
    ts = A.successors[q].get(e)
    return ts[0] if ts else None


def _run(A, q, s):
    for e in s:
        if q is None:
            return None
        q = _next(A, q, e)
    return q


# -- DC1 / DC2 --------------------------------------------------------------


def check_dc1(A: Automaton, E1, E2) -> Verdict:
    """Adjacent private events of different agents must commute in definedness."""
    A, E1, E2 = _prepare(A, E1, E2)
    out = []
    for q in A.states:
        en, p1, p2 = _private_pairs(A, q, E1, E2)
        for e1 in p1:
            for e2 in p2:
                if _run(A, q, (e1, e2)) is None or _run(A, q, (e2, e1)) is None:
                    out.append(Witness("DC1", q, (e1, e2)))
    return Verdict(not out, out, True, "DC1")


def check_dc2(A: Automaton, E1, E2) -> Verdict:
    """Both orders ``e1 e2`` and ``e2 e1`` allow exactly the same continuations.

    Decided per pair by comparing the bisimulation blocks of the two target
    states (equivalent to language equality, ``A`` being deterministic).
    """
    A, E1, E2 = _prepare(A, E1, E2)
    blocks = None
    out = []
    p1, p2 = sorted(E1 - E2), sorted(E2 - E1)
    for q in A.states:
        for e1 in p1:
            for e2 in p2:
                t12 = _run(A, q, (e1, e2))
                t21 = _run(A, q, (e2, e1))
                if t12 is None and t21 is None:
                    continue
                if t12 is None or t21 is None:
                    out.append(Witness("DC2", q, (e1, e2), ((),)))
                    continue
                if blocks is None:
                    blocks = state_blocks(A)
                if blocks[t12] != blocks[t21]:
                    s = distinguishing_string(A, A, t12, t21)
                    if s is None:
                        raise InternalConsistencyError("bisimulation blocks differ on language-equal states")
                    out.append(Witness("DC2", q, (e1, e2), (s,)))
    return Verdict(not out, out, True, "DC2")


# -- DC3 --------------------------------------------------------------------


def _event_kinds(order, E1, E2):
    kind = np.empty(len(order), dtype=np.int64)
    for i, e in enumerate(order):
        kind[i] = 3 if (e in E1 and e in E2) else (1 if e in E1 else 2)
    return kind


def _completable(delta, kind, a):
    """States that reach an ``a`` transition using non-common events only."""
    comp = delta[:, a] >= 0
    private = np.flatnonzero(kind != 3)
    changed = True
    while changed:
        sub = delta[:, private]
        hit = ((sub >= 0) & comp[np.where(sub >= 0, sub, 0)]).any(axis=1)
        new = comp | hit
        changed = bool((new != comp).any())
        comp = new
    return comp


def _completions(A, x, a, E1, E2, comp, want=2):
    """Up to ``want`` shortest strings ``u a`` from ``x`` with ``u`` private.

    Only states in ``comp`` (those that can still reach ``a``) are expanded.
    """
    found = []
    common = E1 & E2
    queue = deque([(x, ())])
    seen = {(x, ())}
    while queue and len(found) < want:
        q, u = queue.popleft()
        if _next(A, q, a) is not None:
            found.append(u + (a,))
            if len(found) >= want:
                break
        for e, (t,) in A.successors[q].items():
            if e in common or t not in comp:
                continue
            key = (t, u + (e,))
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return found


def _decode(code, n):
    nn = n * n
    return code // (n * nn), (code // nn) % n, (code // n) % n, code % n


def _dc3_witness_from_bad(A, order, E1, E2, a, comp, codes, parent, move, p, mv):
    m = len(order)
    n = A.n_states
    chain = [mv]
    k = p
    while parent[k] >= 0:
        chain.append(int(move[k]))
        k = int(parent[k])
    chain.reverse()
    _, root, _, _ = _decode(int(codes[k]), n)
    q = A.states[root]
    sigma, sigma2, w = [], [], []
    for mvid in chain:
        agent, e = divmod(mvid, m)
        ev = order[e]
        if agent == 0:
            sigma.append(ev)
            if ev in E1:
                w.append(ev)
        elif agent == 1:
            sigma2.append(ev)
            if ev in E2:
                w.append(ev)
        else:
            sigma.append(ev)
            sigma2.append(ev)
            w.append(ev)
    sigma, sigma2, w = tuple(sigma), tuple(sigma2), tuple(w)
    x_end = _run(A, q, sigma)
    y_end = _run(A, q, sigma2)
    if a in sigma:
        c1 = [()] + [(e,) for e in A.successors[x_end]]
        c2 = [()] + [(e,) for e in A.successors[y_end]]
    else:
        c1 = _completions(A, x_end, a, E1, E2, comp)
        c2 = _completions(A, y_end, a, E1, E2, comp)
    for u1 in c1:
        for u2 in c2:
            s, s2 = sigma + u1, sigma2 + u2
            if s != s2:
                return Witness("DC3", q, (a,), (s, s2, w))
    return None


def _first_common(s, common):
    for e in s:
        if e in common:
            return e
    return None


def interleaving_violation(A: Automaton, q, left, right, E1, E2):
    """Shortest ``w`` in the interleaving of ``left`` and ``right`` undefined from ``q``."""
    E1, E2 = frozenset(E1), frozenset(E2)
    start = (0, 0, q)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (i, j, z), w = queue.popleft()
        moves = []
        if i < len(left) and left[i] not in E2:
            moves.append((left[i], i + 1, j))
        if j < len(right) and right[j] not in E1:
            moves.append((right[j], i, j + 1))
        if i < len(left) and j < len(right) and left[i] == right[j] and left[i] in E1 & E2:
            moves.append((left[i], i + 1, j + 1))
        for e, i2, j2 in moves:
            z2 = _next(A, z, e)
            if z2 is None:
                return w + (e,)
            key = (i2, j2, z2)
            if key not in seen:
                seen.add(key)
                queue.append((key, w + (e,)))
    return None


def _enumerate_paths(A, q, a, common):
    """Strings from ``q`` whose first common event is ``a``, each transition
    used at most ``MAX_TRANSITION_USES`` times. Returns (paths, exhaustive)."""
    out = []
    exhaustive = True
    uses = {}

    def dfs(state, s, seen_a):
        nonlocal exhaustive
        if len(out) >= MAX_PATHS:
            exhaustive = False
            return
        if seen_a:
            out.append(s)
        for e, (t,) in A.successors[state].items():
            if not seen_a and e in common and e != a:
                continue
            key = (state, e)
            if uses.get(key, 0) >= MAX_TRANSITION_USES:
                exhaustive = False
                continue
            uses[key] = uses.get(key, 0) + 1
            dfs(t, s + (e,), seen_a or e == a)
            uses[key] -= 1

    dfs(q, (), False)
    return out, exhaustive


def _dc3_enumerate(A, E1, E2, a, roots):
    common = E1 & E2
    exact = True
    for q in roots:
        paths, exhaustive = _enumerate_paths(A, q, a, common)
        exact &= exhaustive
        p1 = {s: project_string(s, E1) for s in paths}
        p2 = {s: project_string(s, E2) for s in paths}
        for s, s2 in itertools.permutations(sorted(paths, key=lambda x: (len(x), x)), 2):
            w = interleaving_violation(A, q, p1[s], p2[s2], E1, E2)
            if w is not None:
                return Witness("DC3", q, (a,), (s, s2, w)), exact
    return None, exact


def check_dc3(A: Automaton, E1, E2) -> Verdict:
    """Cross interleavings of strings with the same first common event stay legal.

    For every reachable ``q`` and common ``a``, and all ``s != s'`` from ``q``
    whose first common event is ``a``: every string of ``p1(s)|p2(s')`` must
    be defined from ``q``.
    """
    A, E1, E2 = _prepare(A, E1, E2)
    common = sorted(E1 & E2)
    if not common:
        return Verdict(True, (), True, "DC3")
    order = A.event_list
    delta = A.delta_table(order)
    kind = _event_kinds(order, E1, E2)
    witnesses = []
    exact = True
    for a in common:
        ai = order.index(a)
        comp = _completable(delta, kind, ai)
        roots = np.flatnonzero(comp).astype(np.int64)
        if roots.size == 0:
            continue
        try:
            codes, parent, move, bp, bm = kernels.dc3_search(delta, kind, comp, ai, roots, dc3_limit())
        except MemoryError:
            wit, ex = _dc3_enumerate(A, E1, E2, a, [A.states[r] for r in roots])
            exact &= ex
            if wit is not None:
                witnesses.append(wit)
            continue
        if bp.size == 0:
            continue
        wit = None
        comp_names = {A.states[i] for i in roots.tolist()}
        for p, mv in zip(bp.tolist(), bm.tolist()):
            wit = _dc3_witness_from_bad(A, order, E1, E2, a, comp_names, codes, parent, move, p, mv)
            if wit is not None:
                break
        if wit is None:
            wit, ex = _dc3_enumerate(A, E1, E2, a, [A.states[r] for r in roots])
            exact &= ex
        if wit is not None:
            witnesses.append(wit)
    return Verdict(not witnesses, witnesses, exact, "DC3")


# -- DC4 --------------------------------------------------------------------


def _dc4_witness(P, agent):
    for x in accessible(P).states:
        for e, targets in P.successors[x].items():
            for x1, x2 in itertools.combinations(targets, 2):
                t = distinguishing_string(P, P, x1, x2)
                if t is not None:
                    return Witness("DC4", x, (e,), (t,), agent, (x1, x2))
    return None


def check_dc4(A: Automaton, E1, E2) -> Verdict:
    """Each projection must be bisimilar to its determinization."""
    A, E1, E2 = _prepare(A, E1, E2)
    out = []
    for agent, E in ((1, E1), (2, E2)):
        P = project_automaton(A, E)
        ok = bisimilar(P, determinize(P)) is not None
        wit = _dc4_witness(P, agent)
        if ok != (wit is None):
            raise InternalConsistencyError(
                f"DC4 on agent {agent}: determinization check and witness search disagree"
            )
        if wit is not None:
            out.append(wit)
    return Verdict(not out, out, True, "DC4")


# -- oracle and two-agent decomposition --------------------------------------


def _as_alphabets(alphabets) -> AlphabetSystem:
    if isinstance(alphabets, AlphabetSystem):
        return alphabets
    return AlphabetSystem(tuple(alphabets))


def decomposable_oracle(A: Automaton, alphabets) -> Verdict:
    """``parallel_many`` of the projections must be bisimilar to ``A``.

    On failure the single ``ORACLE`` witness carries the shortest string on
    which the languages differ, or no string if only bisimilarity fails.
    """
    alphabets = _as_alphabets(alphabets)
    if not is_deterministic(A):
        raise NondeterministicError("decomposability checks need a deterministic automaton")
    alphabets.check_cover(A)
    A = accessible(A)
    composed = parallel_many([project_automaton(A, E) for E in alphabets.locals])
    if bisimilar(A, composed) is not None:
        return Verdict(True, (), True, "oracle")
    t = distinguishing_string(A, composed)
    strings = (t,) if t is not None else ()
    return Verdict(False, (Witness("ORACLE", A.initial, (), strings),), True, "oracle")


def decompose_two(A: Automaton, E1, E2, strict: bool = True):
    """Run DC1-DC4 and the oracle; return ``(verdict, (P1, P2) or None)``.

    The oracle decides. If the conditions, all decided exactly, disagree
    with it, ``strict`` raises :class:`InternalConsistencyError`; otherwise
    the verdict is returned with ``consistent=False``. Such disagreements
    do occur (see the ``theorem-*`` corpus cases), so callers that must not
    crash pass ``strict=False``.
    """
    A, E1, E2 = _prepare(A, E1, E2)
    checks = [check_dc1(A, E1, E2), check_dc2(A, E1, E2), check_dc3(A, E1, E2), check_dc4(A, E1, E2)]
    oracle = decomposable_oracle(A, (E1, E2))
    exact = all(c.exact for c in checks)
    conj = all(c.holds for c in checks)
    # witnesses are concrete, so a failed condition contradicts a holding
    # oracle even when some check was bounded
    consistent = not ((oracle.holds and not conj) or (exact and conj and not oracle.holds))
    if strict and not consistent:
        raise InternalConsistencyError(
            f"conditions ({'hold' if conj else 'fail'}) disagree with the oracle "
            f"({'holds' if oracle.holds else 'fails'})"
        )
    witnesses = [w for c in checks for w in c.witnesses]
    if not oracle.holds and not witnesses:
        witnesses = list(oracle.witnesses)
    verdict = Verdict(
        oracle.holds,
        () if oracle.holds else witnesses,
        exact,
        "decomposable",
        tuple(checks) + (oracle,),
        consistent,
    )
    if not oracle.holds:
        return verdict, None
    return verdict, (project_automaton(A, E1), project_automaton(A, E2))


def lower_simulation_holds(A: Automaton, E1, E2) -> bool:
    """``A ≺ P1 || P2``, true for every deterministic ``A``."""
    return simulates(A, parallel(project_automaton(A, E1), project_automaton(A, E2))) is not None
