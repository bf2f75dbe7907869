"""Natural projection, parallel composition, interleaving and determinization."""

from __future__ import annotations

import dataclasses
import os
from collections import deque
from functools import reduce
from typing import Iterable, Sequence

from .automaton import (
    Automaton,
    accessible,
    as_string,
    format_string,
    language_upto,
    path_automaton,
)
from .errors import AlphabetError, ResourceLimitError

DEFAULT_SUBSET_LIMIT = 1_000_000


def subset_limit() -> int:
    raw = os.environ.get("DESDEC_SUBSET_LIMIT")
    if not raw:
        return DEFAULT_SUBSET_LIMIT
    try:
        return int(float(raw))
    except ValueError:
        raise ValueError(f"DESDEC_SUBSET_LIMIT must be a number, got {raw!r}") from None


def project_string(s, events: Iterable[str]) -> tuple:
    """Erase the events of ``s`` that are not in ``events``."""
    keep = frozenset(events)
    return tuple(e for e in as_string(s) if e in keep)


@dataclasses.dataclass(frozen=True)
class StateClass:
    """A block of tau-related states; it becomes one state of the projection."""

    members: frozenset

    @property
    def canonical_name(self) -> str:
        return "+".join(sorted(self.members))

    def __contains__(self, q):
        return q in self.members


def tau_classes(A: Automaton, events: Iterable[str]) -> tuple:
    """Partition the reachable states of ``A`` into tau classes.

    Two states are tau-related when a chain of transitions labelled outside
    ``events`` connects them, in either direction. Classes are ordered by
    their first member in ``A.states`` order.
    """
    keep = frozenset(events)
    A = accessible(A)
    parent = list(range(A.n_states))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    idx = A.index
    for src, ev, dst in A.transitions:
        if ev not in keep:
            a, b = find(idx[src]), find(idx[dst])
            if a != b:
                parent[max(a, b)] = min(a, b)

    groups = {}
    for i, q in enumerate(A.states):
        groups.setdefault(find(i), []).append(q)
    return tuple(StateClass(frozenset(g)) for _, g in sorted(groups.items()))


def project_automaton(A: Automaton, events: Iterable[str]) -> Automaton:
    """Natural projection ``P_i(A)`` onto the local event set ``events``."""
    keep = frozenset(events)
    if not keep <= A.events:
        raise AlphabetError(
            f"local event set is not a subset of the automaton's events: {sorted(keep - A.events)}"
        )
    classes = tau_classes(A, keep)
    name_of = {}
    for c in classes:
        name = c.canonical_name
        for q in c.members:
            name_of[q] = name
    trans = {}
    for src, ev, dst in A.transitions:
        if ev in keep and src in name_of:
            trans[(name_of[src], ev, name_of[dst])] = None
    P = Automaton(
        tuple(c.canonical_name for c in classes),
        name_of[A.initial],
        keep,
        tuple(trans),
    )
    return accessible(P)


def pair_name(q1: str, q2: str) -> str:
    return f"({q1},{q2})"


def parallel(A1: Automaton, A2: Automaton) -> Automaton:
    """Synchronous product: shared events move both sides, private events one side."""
    events = A1.events | A2.events
    order = sorted(events)
    shared = A1.events & A2.events
    s1, s2 = A1.successors, A2.successors
    start = (A1.initial, A2.initial)
    seen = {start: pair_name(*start)}
    queue = deque([start])
    trans = []
    while queue:
        q1, q2 = queue.popleft()
        here = seen[(q1, q2)]
        for e in order:
            if e in shared:
                targets = [(t1, t2) for t1 in s1[q1].get(e, ()) for t2 in s2[q2].get(e, ())]
            elif e in A1.events:
                targets = [(t1, q2) for t1 in s1[q1].get(e, ())]
            else:
                targets = [(q1, t2) for t2 in s2[q2].get(e, ())]
            for t in targets:
                if t not in seen:
                    seen[t] = pair_name(*t)
                    queue.append(t)
                trans.append((here, e, seen[t]))
    return Automaton(tuple(seen.values()), seen[start], events, tuple(trans))


def parallel_many(automata: Sequence[Automaton]) -> Automaton:
    """``A_1 || (A_2 || (... || A_n))``."""
    automata = list(automata)
    if not automata:
        raise ValueError("parallel_many needs at least one automaton")
    return reduce(lambda acc, A: parallel(A, acc), reversed(automata[:-1]), automata[-1])


@dataclasses.dataclass(frozen=True)
class InterleavingLanguage:
    """``s | s'``: the language of the product of two path automata."""

    left: tuple
    right: tuple
    automaton: Automaton

    def strings(self) -> set:
        return language_upto(self.automaton, len(self.left) + len(self.right))

    def maximal(self) -> set:
        lang = self.strings()
        return {w for w in lang if not any(len(v) == len(w) + 1 and v[:-1] == w for v in lang)}

    def __contains__(self, w):
        return self.automaton.defined(as_string(w))


def interleave(s, s_prime, events1: Iterable[str], events2: Iterable[str]) -> InterleavingLanguage:
    s, s_prime = as_string(s), as_string(s_prime)
    E1, E2 = frozenset(events1), frozenset(events2)
    if not set(s) <= E1:
        raise AlphabetError(f"left string {format_string(s)} uses events outside {sorted(E1)}")
    if not set(s_prime) <= E2:
        raise AlphabetError(f"right string {format_string(s_prime)} uses events outside {sorted(E2)}")
    product = parallel(path_automaton("l", s, E1), path_automaton("r", s_prime, E2))
    return InterleavingLanguage(s, s_prime, product)


def subset_name(members) -> str:
    return "{" + ",".join(sorted(members)) + "}"


def determinize(A: Automaton, limit: int | None = None) -> Automaton:
    """Subset construction over the accessible part of ``A``."""
    if limit is None:
        limit = subset_limit()
    A = accessible(A)
    succ = A.successors
    order = A.event_list
    start = frozenset([A.initial])
    names = {start: subset_name(start)}
    queue = deque([start])
    trans = []
    while queue:
        S = queue.popleft()
        for e in order:
            T = frozenset(t for q in S for t in succ[q].get(e, ()))
            if not T:
                continue
            if T not in names:
                if len(names) >= limit:
                    raise ResourceLimitError(
                        f"determinization exceeded {limit} subset states (DESDEC_SUBSET_LIMIT)"
                    )
                names[T] = subset_name(T)
                queue.append(T)
            trans.append((names[S], e, names[T]))
    return Automaton(tuple(names.values()), names[start], A.events, tuple(trans))
