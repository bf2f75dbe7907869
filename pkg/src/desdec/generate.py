"""Random automata and alphabet splits for property tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .automaton import Automaton, accessible


def random_automaton(
    rng: np.random.Generator,
    n_states: int,
    events,
    density: float = 0.4,
    deterministic: bool = True,
    acyclic: bool = False,
    prefix: str = "q",
) -> Automaton:
    """A random automaton restricted to its accessible part.

    Each (state, event) pair gets a transition with probability ``density``;
    nondeterministic automata may get a second target. With ``acyclic``
    targets always have a larger index than the source.
    """
    events = list(events)
    states = [f"{prefix}{i}" for i in range(n_states)]
    trans = set()
    for i in range(n_states):
        for e in events:
            if rng.random() >= density:
                continue
            lo = i + 1 if acyclic else 0
            if lo >= n_states:
                continue
            k = 1 if deterministic or rng.random() < 0.6 else 2
            for j in rng.choice(np.arange(lo, n_states), size=min(k, n_states - lo), replace=False):
                trans.add((states[i], e, states[int(j)]))
    return accessible(Automaton(tuple(states), states[0], frozenset(events), tuple(trans)))


def random_split(rng: np.random.Generator, events, max_common: int = 2, proper: bool = False):
    """Random ``(E1, E2)`` covering ``events`` with 0..max_common common events.

    Both sides are non-empty. With ``proper`` each side also keeps at least
    one private event, so neither set contains the other (needs two events).
    """
    events = sorted(events)
    n = len(events)
    if proper and n < 2:
        raise ValueError("a proper split needs at least two events")
    top = min(max_common, n - 2) if proper else min(max_common, n)
    k = int(rng.integers(0, top + 1))
    perm = [events[i] for i in rng.permutation(n)]
    common, rest = perm[:k], perm[k:]
    side = rng.integers(0, 2, size=len(rest))
    if proper:
        side[0], side[-1] = 0, 1
    E1 = set(common) | {e for e, s in zip(rest, side) if s == 0}
    E2 = set(common) | {e for e, s in zip(rest, side) if s == 1}
    if not E1:
        E1.add(rest[0] if rest else events[0])
    if not E2:
        E2.add(rest[-1] if rest else events[-1])
    return frozenset(E1), frozenset(E2)


def random_instance(
    rng: np.random.Generator, max_states: int = 8, max_events: int = 6, max_common: int = 2, proper: bool = False
):
    """Deterministic automaton plus a two-agent split covering its events exactly."""
    while True:
        n = int(rng.integers(1, max_states + 1))
        m = int(rng.integers(2, max_events + 1))
        names = [f"e{i}" for i in range(m)]
        A = random_automaton(rng, n, names, density=float(rng.uniform(0.2, 0.7)))
        used = {e for _, e, _ in A.transitions}
        if len(used) < 2:
            continue
        A = A.with_events(used)
        E1, E2 = random_split(rng, used, max_common, proper)
        return A, E1, E2
