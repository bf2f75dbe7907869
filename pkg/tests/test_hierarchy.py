import numpy as np
import pytest
from hypothesis import given

from desdec import Automaton, AlphabetSystem
from desdec.compose import parallel, parallel_many, project_automaton
from desdec.corpus import robot_cycles
from desdec.equivalence import bisimilar, simulates
from desdec.errors import AlphabetError, ArityError
from desdec.generate import random_automaton
from desdec.hierarchy import (
    hierarchical_decompose,
    intermediate_check,
    universal_controller,
    verify_closed_loop,
)

from .conftest import automata


@pytest.fixture(scope="module")
def robot():
    from desdec.corpus import load_case

    return load_case("robot")


def _check_result_invariants(A, alphabets, res):
    assert res.complete == (res.residual is None) == (len(res.locals) == alphabets.n)
    assert bisimilar(res.recomposed(), A) is not None


class TestRobot:
    def test_shape(self, robot):
        A = robot.automaton
        assert (A.n_states, len(A.transitions)) == (107, 239)
        assert [c.n_states for c in robot_cycles()] == [9, 7, 13]

    def test_default_order(self, robot):
        res = hierarchical_decompose(robot.automaton, robot.alphabets)
        assert res.complete and res.order == (1, 2, 3)
        _check_result_invariants(robot.automaton, robot.alphabets, res)

    def test_order_213_matches_cycles(self, robot):
        A, al = robot.automaton, robot.alphabets
        res = hierarchical_decompose(A, al, order=[2, 1, 3])
        assert res.complete and res.order == (2, 1, 3)
        assert len(res.stages) == 2
        for k, cyc in zip((1, 2, 3), robot_cycles()):
            assert bisimilar(res.local(k), cyc) is not None
        # first split: agent 2 against the union of agents 1 and 3
        k, (Ek, rest) = res.stages[0]
        assert k == 2 and rest == al[1] | al[3]
        assert bisimilar(project_automaton(A, rest), parallel(robot_cycles()[0], robot_cycles()[2])) is not None
        _check_result_invariants(A, al, res)

    def test_intermediate_check(self, robot):
        al = robot.alphabets
        v = intermediate_check(robot.automaton, (al[2], al[1] | al[3]))
        assert v.holds and v.consistent
        assert {c.condition for c in v.checks if c.holds} == {"DC1", "DC2", "DC3", "DC4", "oracle"}

    def test_repeatable(self, robot):
        a = hierarchical_decompose(robot.automaton, robot.alphabets, order=[3, 1, 2])
        b = hierarchical_decompose(robot.automaton, robot.alphabets, order=[3, 1, 2])
        assert a.order == b.order
        assert [X for _, _, X in a.locals] == [X for _, _, X in b.locals]


class TestStalls:
    def test_chain_no_split(self, case):
        af = case("ex_chain")
        res = hierarchical_decompose(af.automaton, af.alphabets)
        assert not res.complete and res.locals == () and res.residual_agents == (1, 2)
        _check_result_invariants(af.automaton, af.alphabets, res)

    def test_partial_three_agents(self, case):
        # chain problem on agents 1,2 and an independent agent 3
        base = case("ex_chain").automaton
        third = Automaton.from_transitions("z0", [("z0", "x", "z1")])
        A = parallel(base, third)
        al = AlphabetSystem(({"e1"}, {"e2"}, {"x"}))
        for exhaustive in (False, True):
            res = hierarchical_decompose(A, al, exhaustive=exhaustive)
            _check_result_invariants(A, al, res)
            assert not res.complete
        res = hierarchical_decompose(A, al, exhaustive=True)
        assert 3 in res.order and set(res.residual_agents) == {1, 2}

    def test_arity(self, case):
        af = case("ex_chain")
        with pytest.raises(ArityError):
            hierarchical_decompose(af.automaton, AlphabetSystem(({"e1", "e2"},)))
        with pytest.raises(ArityError):
            hierarchical_decompose(af.automaton, af.alphabets, order=[1, 1])

    def test_random_invariants(self):
        rng = np.random.default_rng(2024)
        for _ in range(60):
            parts = [random_automaton(rng, int(rng.integers(1, 4)), ev, density=0.6)
                     for ev in (["a", "s"], ["b", "s", "t"], ["c", "t"])]
            A = parallel_many(parts)
            al = AlphabetSystem(tuple(frozenset(p.events) for p in parts))
            if A.events != al.global_events:
                continue
            res = hierarchical_decompose(A, al, exhaustive=bool(rng.integers(0, 2)))
            _check_result_invariants(A, al, res)


def _prune(rng, A):
    keep = [t for t in A.transitions if rng.random() < 0.7]
    return Automaton(A.states, A.initial, A.events, tuple(keep))


class TestParallelLemmas:
    def test_simulation_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            A2 = random_automaton(rng, int(rng.integers(1, 6)), ["a", "s"], density=0.5, deterministic=False)
            A4 = random_automaton(rng, int(rng.integers(1, 6)), ["b", "s"], density=0.5, deterministic=False)
            A1, A3 = _prune(rng, A2), _prune(rng, A4)
            assert simulates(A1, A2) is not None and simulates(A3, A4) is not None
            assert simulates(parallel(A1, A3), parallel(A2, A4)) is not None

    @given(automata(max_states=4, events=("a", "s"), deterministic=False),
           automata(max_states=4, events=("b", "s"), deterministic=False))
    def test_bisimulation_preserved(self, A1, A3):
        A2, A4 = _clone_states(A1), _clone_states(A3)
        assert bisimilar(A1, A2) is not None and bisimilar(A3, A4) is not None
        assert bisimilar(parallel(A1, A3), parallel(A2, A4)) is not None


def _clone_states(A):
    """Bisimilar copy: every state gets a twin and every other edge is redirected to it."""
    twin = {q: q + "_" for q in A.states}
    trans = set()
    for i, (s, e, d) in enumerate(A.transitions):
        tgt = twin[d] if i % 2 else d
        trans.add((s, e, tgt))
        trans.add((twin[s], e, tgt))
    return Automaton(A.states + tuple(twin.values()), A.initial, A.events, tuple(trans))


class TestClosedLoop:
    def _setup(self, robot):
        al = robot.alphabets
        plants = robot_cycles()
        ctrls = [universal_controller(al[i], f"c{i}") for i in (1, 2, 3)]
        return al, plants, ctrls

    def test_robot_passes(self, robot):
        al, plants, ctrls = self._setup(robot)
        for mode in ("bisimulation", "simulation"):
            v = verify_closed_loop(robot.automaton, plants, ctrls, al, mode)
            assert v.holds and v.failed_agents == ()

    def test_mutant_flagged(self, robot):
        al, plants, ctrls = self._setup(robot)
        P1 = plants[0]
        mutant = Automaton(P1.states, P1.initial, P1.events, tuple(t for t in P1.transitions if t[1] != "r"))
        v = verify_closed_loop(robot.automaton, [mutant] + plants[1:], ctrls, al)
        assert not v.holds and v.failed_agents == (1,) and not v.global_holds
        vs = verify_closed_loop(robot.automaton, [mutant] + plants[1:], ctrls, al, "simulation")
        assert vs.holds  # a restricted loop is still simulated by the specification
        assert vs.to_dict()["mode"] == "simulation"

    def test_errors(self, robot):
        al, plants, ctrls = self._setup(robot)
        with pytest.raises(ArityError):
            verify_closed_loop(robot.automaton, plants[:2], ctrls, al)
        with pytest.raises(AlphabetError):
            verify_closed_loop(robot.automaton, plants[::-1], ctrls, al)
        with pytest.raises(ValueError):
            verify_closed_loop(robot.automaton, plants, ctrls, al, "trace")

    def test_universal_controller(self):
        C = universal_controller({"a", "b"})
        P = Automaton.from_transitions("p", [("p", "a", "q")], events={"a", "b"})
        assert bisimilar(parallel(C, P), P) is not None
