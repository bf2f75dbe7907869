import pytest
from hypothesis import given

from desdec import Automaton, accessible, language_upto
from desdec.compose import determinize, parallel, project_automaton
from desdec.equivalence import (
    Relation,
    bisimilar,
    check_bisimulation,
    check_isomorphism,
    check_simulation,
    distinguishing_string,
    isomorphic,
    isomorphism,
    language_equal,
    simulates,
    simulation_matrix,
    state_blocks,
)
from desdec.generate import random_automaton

from .conftest import automata


# -- naive oracles: textbook greatest fixpoints over all pairs ----------------


def naive_simulation(A1, A2):
    s1, s2 = A1.successors, A2.successors
    R = {(p, q) for p in A1.states for q in A2.states}
    changed = True
    while changed:
        changed = False
        for p, q in list(R):
            ok = all(
                any((p2, q2) in R for q2 in s2[q].get(e, ()))
                for e, ts in s1[p].items()
                for p2 in ts
            )
            if not ok:
                R.discard((p, q))
                changed = True
    return R


def naive_bisimulation(A1, A2):
    s1, s2 = A1.successors, A2.successors
    R = {(p, q) for p in A1.states for q in A2.states}
    changed = True
    while changed:
        changed = False
        for p, q in list(R):
            fwd = all(any((p2, q2) in R for q2 in s2[q].get(e, ())) for e, ts in s1[p].items() for p2 in ts)
            bwd = all(any((p2, q2) in R for p2 in s1[p].get(e, ())) for e, ts in s2[q].items() for q2 in ts)
            if not (fwd and bwd):
                R.discard((p, q))
                changed = True
    return R


def relabel(A):
    """Same automaton with state names shuffled into a different order."""
    m = {q: f"z{len(A.states) - i}" for i, q in enumerate(A.states)}
    return Automaton(
        tuple(m[q] for q in reversed(A.states)),
        m[A.initial],
        A.events,
        tuple((m[s], e, m[d]) for s, e, d in A.transitions),
    )


class TestSimulation:
    @given(automata(deterministic=False, max_states=5), automata(deterministic=False, max_states=5))
    def test_matrix_matches_naive(self, A1, A2):
        S = simulation_matrix(A1, A2)
        naive = naive_simulation(A1, A2)
        for i, p in enumerate(A1.states):
            for j, q in enumerate(A2.states):
                assert bool(S[i, j]) == ((p, q) in naive)

    @given(automata(deterministic=False, max_states=5), automata(deterministic=False, max_states=5))
    def test_simulates_decision(self, A1, A2):
        R = simulates(A1, A2)
        assert (R is not None) == ((A1.initial, A2.initial) in naive_simulation(A1, A2))
        if R is not None:
            assert check_simulation(R, A1, A2)

    @given(automata(deterministic=False))
    def test_reflexive(self, A):
        R = simulates(A, A)
        assert R is not None and (A.initial, A.initial) in R

    @given(automata(deterministic=False, max_states=4), automata(deterministic=False, max_states=4),
           automata(deterministic=False, max_states=4))
    def test_transitive(self, A, B, C):
        if simulates(A, B) is not None and simulates(B, C) is not None:
            assert simulates(A, C) is not None

    @given(automata(deterministic=False))
    def test_implies_language_inclusion(self, A):
        B = accessible(A)
        sub = Automaton(B.states, B.initial, B.events, B.transitions[: len(B.transitions) // 2])
        assert simulates(sub, B) is not None
        assert language_upto(sub, 4) <= language_upto(B, 4)

    def test_not_symmetric(self):
        small = Automaton.from_transitions("p", [("p", "a", "p1")], events={"a", "b"})
        big = Automaton.from_transitions("q", [("q", "a", "q1"), ("q", "b", "q2")])
        assert simulates(small, big) is not None
        assert simulates(big, small) is None

    def test_check_rejects_bad_relation(self):
        A = Automaton.from_transitions("p", [("p", "a", "p1")])
        B = Automaton.from_transitions("q", [("q", "a", "q1")])
        assert not check_simulation(Relation({("p", "q")}), A, B)
        assert check_simulation(Relation({("p", "q"), ("p1", "q1")}), A, B)
        assert not check_simulation(Relation({("p1", "q1")}), A, B)


class TestBisimulation:
    @given(automata(deterministic=False, max_states=5), automata(deterministic=False, max_states=5))
    def test_decision_matches_naive(self, A1, A2):
        R = bisimilar(A1, A2)
        assert (R is not None) == ((A1.initial, A2.initial) in naive_bisimulation(A1, A2))
        if R is not None:
            assert check_bisimulation(R, A1, A2)
            assert R.pairs <= naive_bisimulation(A1, A2)

    @given(automata(deterministic=False))
    def test_state_blocks_match_naive(self, A):
        blocks = state_blocks(A)
        naive = naive_bisimulation(A, A)
        for p in A.states:
            for q in A.states:
                assert (blocks[p] == blocks[q]) == ((p, q) in naive)

    @given(automata(deterministic=False))
    def test_relabel_and_symmetry(self, A):
        B = relabel(A)
        R = bisimilar(A, B)
        assert R is not None
        assert bisimilar(B, A).pairs == R.inverse().pairs

    @given(automata())
    def test_deterministic_bisim_iff_language(self, A):
        for B in (determinize(A), accessible(A)):
            assert (bisimilar(A, B) is not None) == language_equal(A, B)

    def test_classic_non_bisimilar_equal_language(self):
        # a.(b + c) versus a.b + a.c
        A = Automaton.from_transitions("p", [("p", "a", "p1"), ("p1", "b", "p2"), ("p1", "c", "p3")])
        B = Automaton.from_transitions(
            "q", [("q", "a", "q1"), ("q", "a", "q2"), ("q1", "b", "q3"), ("q2", "c", "q4")]
        )
        assert language_equal(A, B)
        assert bisimilar(A, B) is None
        assert simulates(B, A) is not None and simulates(A, B) is None

    def test_diamond_corpus(self, case):
        R = bisimilar(case("ex_diamond_1").automaton, case("ex_diamond_2").automaton)
        assert R is not None

    def test_events_union(self):
        # an unused event in one automaton does not break bisimilarity
        A = Automaton.from_transitions("p", [("p", "a", "p")], events={"a", "z"})
        B = Automaton.from_transitions("q", [("q", "a", "q")])
        assert bisimilar(A, B) is not None

    def test_random_large(self, rng):
        for _ in range(20):
            A = random_automaton(rng, 40, list("abcd"), density=0.3, deterministic=False)
            assert bisimilar(A, relabel(A)) is not None
            P = project_automaton(A, set("ab"))
            assert bisimilar(P, P) is not None


class TestLanguage:
    def test_distinguishing_string_shortlex(self):
        A = Automaton.from_transitions("p", [("p", "a", "p1"), ("p1", "b", "p2")])
        B = Automaton.from_transitions("q", [("q", "a", "q1"), ("q1", "c", "q2")])
        assert distinguishing_string(A, B) == ("a", "b")

    @given(automata(deterministic=False, max_states=4), automata(deterministic=False, max_states=4))
    def test_against_bounded_languages(self, A1, A2):
        w = distinguishing_string(A1, A2)
        if w is None:
            assert language_upto(A1, 6) == language_upto(A2, 6)
        else:
            assert A1.defined(w) != A2.defined(w)
            shorter = language_upto(A1, len(w) - 1) == language_upto(A2, len(w) - 1)
            assert shorter

    def test_start_states(self):
        A = Automaton.from_transitions("p", [("p", "a", "p1"), ("p1", "b", "p2")])
        assert distinguishing_string(A, A, start1="p1") == ("a",)
        assert distinguishing_string(A, A, start1="p1", start2="p1") is None


class TestIsomorphism:
    @given(automata(deterministic=False))
    def test_relabelled_is_isomorphic(self, A):
        B = relabel(A)
        theta = isomorphism(A, B)
        assert theta is not None and check_isomorphism(theta, A, B)

    @given(automata())
    def test_implies_bisimilar(self, A):
        B = accessible(A)
        C = relabel(B)
        assert isomorphic(B, C) and bisimilar(B, C) is not None

    def test_bisimilar_not_isomorphic(self):
        A = Automaton.from_transitions("p", [("p", "a", "p")])
        B = Automaton.from_transitions("q", [("q", "a", "r"), ("r", "a", "q")])
        assert bisimilar(A, B) is not None
        assert not isomorphic(A, B)

    def test_event_sets_must_match(self):
        A = Automaton.from_transitions("p", [("p", "a", "p")])
        B = Automaton.from_transitions("p", [("p", "a", "p")], events={"a", "b"})
        assert not isomorphic(A, B)

    def test_non_accessible_backtracking(self):
        A = Automaton(("p", "x", "y"), "p", frozenset("ab"), (("p", "a", "p"), ("x", "b", "y")))
        B = Automaton(("q", "u", "v"), "q", frozenset("ab"), (("q", "a", "q"), ("v", "b", "u")))
        theta = isomorphism(A, B)
        assert theta == {"p": "q", "x": "v", "y": "u"}

    def test_check_isomorphism_rejects(self):
        A = Automaton.from_transitions("p", [("p", "a", "p1")])
        B = Automaton.from_transitions("q", [("q", "a", "q1")])
        assert check_isomorphism({"p": "q", "p1": "q1"}, A, B)
        assert not check_isomorphism({"p": "q1", "p1": "q"}, A, B)
        assert not check_isomorphism({"p": "q", "p1": "q"}, A, B)


def test_product_with_self_bisimilar_for_deterministic(rng):
    for _ in range(30):
        A = random_automaton(rng, 6, list("abc"), density=0.5)
        assert bisimilar(parallel(A, A), A) is not None
