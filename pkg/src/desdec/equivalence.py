"""Simulation, bisimulation, language equivalence and isomorphism.

Relations returned by :func:`simulates` and :func:`bisimilar` are validated
with :func:`check_simulation` / :func:`check_bisimulation`, which re-check the
step conditions pair by pair without touching the kernels.
"""

from __future__ import annotations

import dataclasses
from collections import deque

import numpy as np

from . import kernels
from .automaton import Automaton, accessible, is_deterministic
from .compose import subset_limit
from .errors import InternalConsistencyError, ResourceLimitError


@dataclasses.dataclass(frozen=True)
class Relation:
    """A set of ``(state of A1, state of A2)`` pairs."""

    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def inverse(self) -> Relation:
        return Relation(frozenset((b, a) for a, b in self.pairs))

    def image(self, p) -> frozenset:
        return frozenset(b for a, b in self.pairs if a == p)


def check_simulation(R: Relation, A1: Automaton, A2: Automaton) -> bool:
    """Does ``R`` witness that ``A2`` simulates ``A1``?

    The initial pair must be in ``R``, and every move ``p -e-> p'`` of a pair
    ``(p, q)`` must be matched by some ``q -e-> q'`` with ``(p', q') in R``.
    """
    if (A1.initial, A2.initial) not in R.pairs:
        return False
    s1, s2 = A1.successors, A2.successors
    for p, q in R.pairs:
        if p not in s1 or q not in s2:
            return False
        for e, targets in s1[p].items():
            options = s2[q].get(e, ())
            for p2 in targets:
                if not any((p2, q2) in R.pairs for q2 in options):
                    return False
    return True


def check_bisimulation(R: Relation, A1: Automaton, A2: Automaton) -> bool:
    return check_simulation(R, A1, A2) and check_simulation(R.inverse(), A2, A1)


def _shared_arrays(A1, A2):
    order = tuple(sorted(A1.events | A2.events))
    return order, A1.arrays(order), A2.arrays(order)


def _joint_reachable(A1, A2, ok):
    """Pairs reachable from the initial pair by joint steps staying inside ``ok``."""
    s1, s2 = A1.successors, A2.successors
    start = (A1.initial, A2.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for e, targets in s1[p].items():
            for q2 in s2[q].get(e, ()):
                for p2 in targets:
                    pair = (p2, q2)
                    if pair not in seen and ok(p2, q2):
                        seen.add(pair)
                        queue.append(pair)
    return frozenset(seen)


def simulation_matrix(A1: Automaton, A2: Automaton) -> np.ndarray:
    """Greatest simulation as a boolean ``n1 x n2`` matrix (state index order)."""
    order, (a1s, a1e, a1d), (a2s, a2e, a2d) = _shared_arrays(A1, A2)
    return kernels.greatest_simulation(
        A1.n_states, a1s, a1e, a1d, A2.n_states, a2s, a2e, a2d, len(order)
    )


def simulates(A1: Automaton, A2: Automaton) -> Relation | None:
    """``Some(R)`` iff ``A2`` simulates ``A1`` (``A1 ≺ A2``).

    ``R`` is the greatest simulation restricted to the pairs reachable from
    the initial pair.
    """
    S = simulation_matrix(A1, A2)
    i1, i2 = A1.index, A2.index
    if not S[i1[A1.initial], i2[A2.initial]]:
        return None
    pairs = _joint_reachable(A1, A2, lambda p, q: S[i1[p], i2[q]])
    R = Relation(pairs)
    if not check_simulation(R, A1, A2):
        raise InternalConsistencyError("greatest simulation failed independent validation")
    return R


def bisimulation_blocks(A1: Automaton, A2: Automaton):
    """Coarsest bisimulation partition of the disjoint union of ``A1`` and ``A2``.

    Returns two block-id arrays, one per automaton, in state index order.
    """
    order, (a1s, a1e, a1d), (a2s, a2e, a2d) = _shared_arrays(A1, A2)
    n1 = A1.n_states
    n = n1 + A2.n_states
    src = np.concatenate([a1s, a2s + n1])
    ev = np.concatenate([a1e, a2e])
    dst = np.concatenate([a1d, a2d + n1])
    blocks = kernels.refine_partition(n, src, ev, dst, len(order), np.zeros(n, dtype=np.int64))
    return blocks[:n1], blocks[n1:]


def bisimilar(A1: Automaton, A2: Automaton) -> Relation | None:
    """``Some(R)`` iff ``A1 ≅ A2``; ``R`` and its inverse are both simulations."""
    b1, b2 = bisimulation_blocks(A1, A2)
    i1, i2 = A1.index, A2.index
    if b1[i1[A1.initial]] != b2[i2[A2.initial]]:
        return None
    pairs = _joint_reachable(A1, A2, lambda p, q: b1[i1[p]] == b2[i2[q]])
    R = Relation(pairs)
    if not check_bisimulation(R, A1, A2):
        raise InternalConsistencyError("bisimulation relation failed independent validation")
    return R


def state_blocks(A: Automaton) -> dict:
    """state -> bisimulation block id within ``A`` alone."""
    src, ev, dst = A.arrays()
    blocks = kernels.refine_partition(
        A.n_states, src, ev, dst, len(A.event_list), np.zeros(A.n_states, dtype=np.int64)
    )
    return {q: int(blocks[i]) for i, q in enumerate(A.states)}


def distinguishing_string(A1: Automaton, A2: Automaton, start1=None, start2=None, limit=None):
    """Shortlex-least string generated from exactly one of the two start states.

    Returns ``None`` when the generated languages are equal. Works on the
    fly over pairs of subsets, so neither side is determinized up front.
    """
    if limit is None:
        limit = subset_limit()
    s1, s2 = A1.successors, A2.successors
    order = sorted(A1.events | A2.events)
    start = (
        frozenset([A1.initial if start1 is None else start1]),
        frozenset([A2.initial if start2 is None else start2]),
    )
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (S1, S2), w = queue.popleft()
        for e in order:
            T1 = frozenset(t for q in S1 for t in s1[q].get(e, ()))
            T2 = frozenset(t for q in S2 for t in s2[q].get(e, ()))
            if bool(T1) != bool(T2):
                return w + (e,)
            if not T1:
                continue
            key = (T1, T2)
            if key not in seen:
                if len(seen) >= limit:
                    raise ResourceLimitError(
                        f"language comparison exceeded {limit} subset pairs (DESDEC_SUBSET_LIMIT)"
                    )
                seen.add(key)
                queue.append((key, w + (e,)))
    return None


def language_equal(A1: Automaton, A2: Automaton) -> bool:
    """Exact equality of the generated (prefix-closed) languages."""
    return distinguishing_string(A1, A2) is None


# -- isomorphism ------------------------------------------------------------


def check_isomorphism(theta: dict, A1: Automaton, A2: Automaton) -> bool:
    if set(theta) != set(A1.states) or set(theta.values()) != set(A2.states):
        return False
    if len(set(theta.values())) != len(theta) or theta[A1.initial] != A2.initial:
        return False
    mapped = {(theta[s], e, theta[d]) for s, e, d in A1.transitions}
    return mapped == set(A2.transitions)


def _bfs_isomorphism(A1, A2):
    theta = {A1.initial: A2.initial}
    used = {A2.initial}
    queue = deque([A1.initial])
    s1, s2 = A1.successors, A2.successors
    while queue:
        p = queue.popleft()
        q = theta[p]
        if s1[p].keys() != s2[q].keys():
            return None
        for e, (p2,) in s1[p].items():
            (q2,) = s2[q][e]
            if p2 in theta:
                if theta[p2] != q2:
                    return None
            else:
                if q2 in used:
                    return None
                theta[p2] = q2
                used.add(q2)
                queue.append(p2)
    return theta


def _signature(A, q, blocks):
    out = tuple(sorted((e, len(ts)) for e, ts in A.successors[q].items()))
    return (blocks[q], out)


def _backtrack_isomorphism(A1, A2):
    b1, b2 = bisimulation_blocks(A1, A2)
    bl1 = {q: int(b1[i]) for i, q in enumerate(A1.states)}
    bl2 = {q: int(b2[i]) for i, q in enumerate(A2.states)}
    indeg1, indeg2 = {q: 0 for q in A1.states}, {q: 0 for q in A2.states}
    for _, _, d in A1.transitions:
        indeg1[d] += 1
    for _, _, d in A2.transitions:
        indeg2[d] += 1
    sig1 = {q: (_signature(A1, q, bl1), indeg1[q]) for q in A1.states}
    sig2 = {q: (_signature(A2, q, bl2), indeg2[q]) for q in A2.states}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None
    cands = {p: [q for q in A2.states if sig2[q] == sig1[p]] for p in A1.states}

    reach = list(accessible(A1).states)
    order = reach + [q for q in A1.states if q not in set(reach)]
    trans1 = set(A1.transitions)
    trans2 = set(A2.transitions)
    theta, used = {}, set()

    def consistent(p):
        for s, e, d in A1.transitions:
            if s == p or d == p:
                if s in theta and d in theta:
                    if (theta[s], e, theta[d]) not in trans2:
                        return False
        return True

    def go(i):
        if i == len(order):
            return True
        p = order[i]
        if p == A1.initial:
            options = [A2.initial] if A2.initial in cands[p] else []
        else:
            options = [q for q in cands[p] if q not in used and q != A2.initial]
        for q in options:
            theta[p] = q
            used.add(q)
            if consistent(p) and go(i + 1):
                return True
            del theta[p]
            used.discard(q)
        return False

    if len(trans1) != len(trans2):
        return None
    return dict(theta) if go(0) else None


def isomorphism(A1: Automaton, A2: Automaton) -> dict | None:
    """A state bijection ``theta`` witnessing ``A1`` isomorphic to ``A2``, or ``None``."""
    if A1.n_states != A2.n_states or len(A1.transitions) != len(A2.transitions):
        return None
    if A1.events != A2.events:
        return None
    if (
        is_deterministic(A1)
        and is_deterministic(A2)
        and accessible(A1).n_states == A1.n_states
    ):
        theta = _bfs_isomorphism(A1, A2)
        if theta is not None and len(theta) != A1.n_states:
            theta = None
    else:
        theta = _backtrack_isomorphism(A1, A2)
    if theta is not None and not check_isomorphism(theta, A1, A2):
        raise InternalConsistencyError("isomorphism failed independent validation")
    return theta


def isomorphic(A1: Automaton, A2: Automaton) -> bool:
    return isomorphism(A1, A2) is not None
