"""Finite automata without marked states.

An :class:`Automaton` is an immutable value: a tuple of state names, an
initial state, a set of events and a set of ``(source, event, target)``
triples. The transition relation may be partial and nondeterministic.
Generated languages are prefix closed; strings are tuples of event names.

Internally every algorithm works on dense state indices, available through
:attr:`Automaton.index` and the cached array views.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetError, AutomatonError

EventString = tuple  # tuple[str, ...]


def check_event(name) -> str:
    if not isinstance(name, str) or not name or not name.isprintable() or any(c.isspace() for c in name):
        raise AutomatonError(f"invalid event name {name!r}")
    return name


def as_string(s) -> EventString:
    """Normalise ``s`` to an event string.

    Accepts a tuple/list of event names or a whitespace separated ``str``.
    """
    if isinstance(s, str):
        return tuple(s.split())
    return tuple(s)


def format_string(s: Sequence[str]) -> str:
    return " ".join(s) if s else "ε"


@dataclasses.dataclass(frozen=True, eq=True)
class Automaton:
    """A finite automaton ``(Q, q0, E, delta)``.

    ``transitions`` is stored sorted by (source position, event, target
    position), so two automata built from the same triples compare equal.
    Construction rejects unknown states, events outside ``events`` and
    duplicate triples.
    """

    states: tuple
    initial: str
    events: frozenset
    transitions: tuple

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise AutomatonError("an automaton needs at least one state")
        index = {}
        for q in states:
            if not isinstance(q, str) or not q:
                raise AutomatonError(f"invalid state name {q!r}")
            if q in index:
                raise AutomatonError(f"duplicate state {q!r}")
            index[q] = len(index)
        if self.initial not in index:
            raise AutomatonError(f"initial state {self.initial!r} is not a state")
        events = frozenset(check_event(e) for e in self.events)

        triples = []
        seen = set()
        for t in self.transitions:
            try:
                src, ev, dst = t
            except (TypeError, ValueError):
                raise AutomatonError(f"malformed transition {t!r}") from None
            if src not in index:
                raise AutomatonError(f"transition {t!r}: unknown source state {src!r}")
            if dst not in index:
                raise AutomatonError(f"transition {t!r}: unknown target state {dst!r}")
            if ev not in events:
                raise AutomatonError(f"transition {t!r}: event {ev!r} not in the event set")
            key = (src, ev, dst)
            if key in seen:
                raise AutomatonError(f"duplicate transition {t!r}")
            seen.add(key)
            triples.append(key)
        triples.sort(key=lambda t: (index[t[0]], t[1], index[t[2]]))

        object.__setattr__(self, "states", states)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "transitions", tuple(triples))

    @classmethod
    def from_transitions(cls, initial, transitions, states=None, events=None) -> Automaton:
        """Build an automaton, inferring states and events when omitted.

        Inferred states are listed in order of first appearance, starting
        with ``initial``.
        """
        transitions = [tuple(t) for t in transitions]
        if states is None:
            order = {initial: None}
            for src, _, dst in transitions:
                order.setdefault(src, None)
                order.setdefault(dst, None)
            states = tuple(order)
        if events is None:
            events = {e for _, e, _ in transitions}
        return cls(tuple(states), initial, frozenset(events), tuple(transitions))

    # -- index views -------------------------------------------------------

    def __hash__(self):
        return hash((self.states, self.initial, self.events, self.transitions))

    @cached_property
    def index(self) -> dict:
        return {q: i for i, q in enumerate(self.states)}

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def event_list(self) -> tuple:
        return tuple(sorted(self.events))

    @cached_property
    def successors(self) -> dict:
        """state -> {event -> tuple of targets}, targets in state order."""
        out = {q: {} for q in self.states}
        for src, ev, dst in self.transitions:
            out[src].setdefault(ev, []).append(dst)
        return {q: {e: tuple(ts) for e, ts in sorted(m.items())} for q, m in out.items()}

    def arrays(self, event_list: Sequence[str] | None = None):
        """Transitions as ``(src, ev, dst)`` int64 arrays.

        Events are numbered by position in ``event_list`` (default: the
        sorted event set). Every event of the automaton must be listed.
        """
        if event_list is None:
            event_list = self.event_list
        eidx = {e: i for i, e in enumerate(event_list)}
        idx = self.index
        m = len(self.transitions)
        src = np.empty(m, dtype=np.int64)
        ev = np.empty(m, dtype=np.int64)
        dst = np.empty(m, dtype=np.int64)
        for k, (s, e, d) in enumerate(self.transitions):
            src[k] = idx[s]
            ev[k] = eidx[e]
            dst[k] = idx[d]
        return src, ev, dst

    def delta_table(self, event_list: Sequence[str] | None = None) -> np.ndarray:
        """Dense ``n x m`` successor table with -1 for undefined moves.

        Only meaningful for deterministic automata.
        """
        if event_list is None:
            event_list = self.event_list
        table = np.full((self.n_states, len(event_list)), -1, dtype=np.int64)
        src, ev, dst = self.arrays(event_list)
        table[src, ev] = dst
        return table

    # -- string semantics --------------------------------------------------

    def step(self, state: str, event: str) -> tuple:
        return self.successors[state].get(event, ())

    def run(self, s, start: str | None = None) -> frozenset:
        """Set of states reachable from ``start`` (default: initial) by reading ``s``."""
        current = {self.initial if start is None else start}
        for e in as_string(s):
            current = {t for q in current for t in self.step(q, e)}
            if not current:
                break
        return frozenset(current)

    def defined(self, s, start: str | None = None) -> bool:
        """``delta(start, s)!``"""
        return bool(self.run(s, start))

    def enabled(self, state: str) -> tuple:
        return tuple(self.successors[state])

    def rename(self, mapping) -> Automaton:
        """Rename states through a dict (missing keys kept) or a callable."""
        f = (lambda q: mapping.get(q, q)) if isinstance(mapping, dict) else mapping
        return Automaton(
            tuple(f(q) for q in self.states),
            f(self.initial),
            self.events,
            tuple((f(s), e, f(d)) for s, e, d in self.transitions),
        )

    def with_events(self, events: Iterable[str]) -> Automaton:
        return Automaton(self.states, self.initial, frozenset(events), self.transitions)

    def __repr__(self):
        return (
            f"Automaton(<{self.n_states} states, {len(self.transitions)} transitions, "
            f"events={sorted(self.events)}>)"
        )


@dataclasses.dataclass(frozen=True)
class AlphabetSystem:
    """Per-agent local event sets ``E_1..E_n``; ``global_events`` is their union."""

    locals: tuple
    global_events: frozenset = None

    def __post_init__(self):
        loc = tuple(frozenset(check_event(e) for e in E) for E in self.locals)
        if not loc:
            raise AutomatonError("an alphabet system needs at least one local event set")
        for i, E in enumerate(loc, start=1):
            if not E:
                raise AutomatonError(f"local event set {i} is empty")
        union = frozenset().union(*loc)
        if self.global_events is not None and frozenset(self.global_events) != union:
            raise AlphabetError(
                "global event set is not the union of the local event sets: "
                f"{sorted(frozenset(self.global_events) ^ union)}"
            )
        object.__setattr__(self, "locals", loc)
        object.__setattr__(self, "global_events", union)

    @property
    def n(self) -> int:
        return len(self.locals)

    def __len__(self):
        return len(self.locals)

    def __getitem__(self, i):
        """1-based access, matching the ``E_1..E_n`` convention."""
        if not 1 <= i <= len(self.locals):
            raise IndexError(i)
        return self.locals[i - 1]

    def union(self, indices: Iterable[int]) -> frozenset:
        return frozenset().union(*(self[i] for i in indices))

    def private(self, i: int) -> frozenset:
        """Events of agent ``i`` shared with no other agent."""
        others = self.union(j for j in range(1, self.n + 1) if j != i)
        return self[i] - others

    def common(self, i: int, j: int) -> frozenset:
        return self[i] & self[j]

    def check_cover(self, automaton: Automaton) -> None:
        if automaton.events != self.global_events:
            raise AlphabetError(
                "local event sets do not cover the automaton's events exactly: "
                f"{sorted(automaton.events ^ self.global_events)}"
            )


def accessible(A: Automaton) -> Automaton:
    """Restrict ``A`` to the states reachable from its initial state."""
    seen = {A.initial}
    queue = deque([A.initial])
    succ = A.successors
    while queue:
        q = queue.popleft()
        for targets in succ[q].values():
            for t in targets:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    if len(seen) == A.n_states:
        return A
    return Automaton(
        tuple(q for q in A.states if q in seen),
        A.initial,
        A.events,
        tuple(t for t in A.transitions if t[0] in seen),
    )


def is_deterministic(A: Automaton) -> bool:
    return all(len(ts) == 1 for m in A.successors.values() for ts in m.values())


def language_upto(A: Automaton, k: int) -> set:
    """All strings of length at most ``k`` generated by ``A``.

    Breadth-first unfolding; frontier pairs ``(state, string)`` are
    deduplicated per depth, so cyclic and nondeterministic automata are fine.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    lang = {()}
    frontier = {(A.initial, ())}
    succ = A.successors
    for _ in range(k):
        nxt = set()
        for q, s in frontier:
            for e, targets in succ[q].items():
                t_s = s + (e,)
                lang.add(t_s)
                for t in targets:
                    nxt.add((t, t_s))
        if not nxt:
            break
        frontier = nxt
    return lang


def path_automaton(start_label: str, s, events: Iterable[str] | None = None) -> Automaton:
    """The linear automaton reading exactly ``s``.

    States are ``start_label + "0" .. start_label + str(len(s))``. The event
    set defaults to the events occurring in ``s``.
    """
    s = as_string(s)
    for e in s:
        check_event(e)
    names = tuple(f"{start_label}{i}" for i in range(len(s) + 1))
    ev = frozenset(s) if events is None else frozenset(events)
    if not set(s) <= ev:
        raise AlphabetError(f"string {format_string(s)} uses events outside {sorted(ev)}")
    trans = tuple((names[i], e, names[i + 1]) for i, e in enumerate(s))
    return Automaton(names, names[0], ev, trans)


def is_path_automaton(A: Automaton) -> bool:
    """True iff ``A`` is one linear chain from its initial state."""
    succ = A.successors
    q = A.initial
    seen = {q}
    while True:
        out = [(e, t) for e, ts in succ[q].items() for t in ts]
        if not out:
            return len(seen) == A.n_states
        if len(out) != 1 or out[0][1] in seen:
            return False
        q = out[0][1]
        seen.add(q)
