"""Hierarchical n-agent decomposition and closed-loop verification."""

from __future__ import annotations

import dataclasses

from .automaton import AlphabetSystem, Automaton, accessible, is_deterministic
from .compose import determinize, parallel, parallel_many, project_automaton
from .decompose import Verdict, decompose_two, decomposable_oracle
from .equivalence import bisimilar, simulates
from .errors import AlphabetError, ArityError


@dataclasses.dataclass(frozen=True)
class DecompositionResult:
    """Output of :func:`hierarchical_decompose`.

    ``order`` lists agent indices in the order their local automata were
    split off; ``locals`` holds ``(index, event set, automaton)`` triples in
    the same order. When the search stalls, ``residual`` is the automaton
    over the union of the agents in ``residual_agents``.
    """

    order: tuple
    locals: tuple
    residual: Automaton | None
    residual_agents: tuple
    complete: bool
    stages: tuple = ()

    def automata(self) -> list:
        out = [A for _, _, A in self.locals]
        if self.residual is not None:
            out.append(self.residual)
        return out

    def local(self, i: int) -> Automaton:
        for k, _, A in self.locals:
            if k == i:
                return A
        raise KeyError(i)

    def recomposed(self) -> Automaton:
        return parallel_many(self.automata())


def _as_alphabets(alphabets) -> AlphabetSystem:
    return alphabets if isinstance(alphabets, AlphabetSystem) else AlphabetSystem(tuple(alphabets))


def _stage_automaton(P: Automaton):
    """A deterministic stand-in for a projected residual, or ``None``."""
    if is_deterministic(P):
        return P
    D = determinize(P)
    return D if bisimilar(P, D) is not None else None


def _try_split(current, alphabets, remaining, k):
    Ek = alphabets[k]
    rest = alphabets.union(j for j in remaining if j != k)
    if not decomposable_oracle(current, (Ek, rest)).holds:
        return None
    nxt = _stage_automaton(project_automaton(current, rest))
    if nxt is None:
        return None
    return project_automaton(current, Ek), nxt, (Ek, rest)


def hierarchical_decompose(A: Automaton, alphabets, order=None, exhaustive: bool = False) -> DecompositionResult:
    """Split off one agent at a time while the two-set oracle holds.

    Candidates are tried in ascending index order unless ``order`` gives a
    priority list. With ``exhaustive`` a stalled branch backtracks to the
    other candidates of earlier stages; the first complete decomposition
    wins, otherwise the deepest partial one found first is returned.
    A stall is not a proof of undecomposability.
    """
    alphabets = _as_alphabets(alphabets)
    alphabets.check_cover(A)
    if alphabets.n < 2:
        raise ArityError("hierarchical decomposition needs at least two agents")
    current = _stage_automaton(accessible(A))
    if current is None:
        raise AlphabetError("input automaton is not bisimilar to a deterministic one")
    priority = list(order) if order is not None else list(range(1, alphabets.n + 1))
    if sorted(priority) != list(range(1, alphabets.n + 1)):
        raise ArityError(f"order must be a permutation of 1..{alphabets.n}")

    best = None

    def finish(chosen, locs, cur, remaining, stages):
        if len(remaining) == 1:
            (k,) = remaining
            return DecompositionResult(
                tuple(chosen) + (k,),
                tuple(locs) + ((k, alphabets[k], cur),),
                None,
                (),
                True,
                tuple(stages),
            )
        return DecompositionResult(tuple(chosen), tuple(locs), cur, tuple(remaining), False, tuple(stages))

    def search(cur, remaining, chosen, locs, stages):
        nonlocal best
        if len(remaining) == 1:
            return finish(chosen, locs, cur, remaining, stages)
        for k in [k for k in priority if k in remaining]:
            step = _try_split(cur, alphabets, remaining, k)
            if step is None:
                continue
            local, nxt, split = step
            rem = [j for j in remaining if j != k]
            res = search(nxt, rem, chosen + [k], locs + [(k, alphabets[k], local)], stages + [(k, split)])
            if res.complete or not exhaustive:
                return res
        partial = finish(chosen, locs, cur, remaining, stages)
        if best is None or len(partial.locals) > len(best.locals):
            best = partial
        return partial

    result = search(current, [k for k in priority], [], [], [])
    if not result.complete and exhaustive and best is not None:
        return best
    return result


def intermediate_check(A: Automaton, stage_split) -> Verdict:
    """DC1-DC4 and oracle verdicts for one proposed split, as a diagnostic."""
    E1, E2 = stage_split
    verdict, _ = decompose_two(A, E1, E2, strict=False)
    return verdict


# -- closed loop -------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ClosedLoopVerdict:
    holds: bool
    mode: str
    agents: tuple
    global_holds: bool

    @property
    def failed_agents(self) -> tuple:
        return tuple(i for i, ok in enumerate(self.agents, start=1) if not ok)

    def to_dict(self) -> dict:
        return {
            "condition": "closed-loop",
            "mode": self.mode,
            "holds": self.holds,
            "agents": [{"agent": i, "holds": ok} for i, ok in enumerate(self.agents, start=1)],
            "global": self.global_holds,
            "failed_agents": list(self.failed_agents),
        }


def universal_controller(events, name: str = "c") -> Automaton:
    """One state with a self loop on every event: ``C || P`` behaves like ``P``."""
    return Automaton((name,), name, frozenset(events), tuple((name, e, name) for e in sorted(events)))


def verify_closed_loop(spec: Automaton, plants, controllers, alphabets, mode: str = "bisimulation") -> ClosedLoopVerdict:
    """Check each ``C_i || P_i`` against ``P_i(spec)`` and their composition against ``spec``.

    ``mode`` is ``"bisimulation"`` (≅ everywhere) or ``"simulation"``
    (closed loops must be simulated by the specification).
    """
    if mode not in ("bisimulation", "simulation"):
        raise ValueError(f"unknown mode {mode!r}")
    alphabets = _as_alphabets(alphabets)
    plants, controllers = list(plants), list(controllers)
    if len(plants) != alphabets.n or len(controllers) != alphabets.n:
        raise ArityError(
            f"expected {alphabets.n} plants and controllers, got {len(plants)} and {len(controllers)}"
        )
    alphabets.check_cover(spec)
    rel = bisimilar if mode == "bisimulation" else simulates
    loops, agents = [], []
    for i, (P, C) in enumerate(zip(plants, controllers), start=1):
        if (P.events | C.events) != alphabets[i]:
            raise AlphabetError(
                f"agent {i}: plant and controller events {sorted(P.events | C.events)} "
                f"differ from the local event set {sorted(alphabets[i])}"
            )
        loop = parallel(C, P)
        loops.append(loop)
        agents.append(rel(loop, project_automaton(spec, alphabets[i])) is not None)
    global_ok = rel(parallel_many(loops), spec) is not None
    return ClosedLoopVerdict(all(agents) and global_ok, mode, tuple(agents), global_ok)
