import json

import pytest
from hypothesis import given

from desdec import Automaton, AlphabetSystem
from desdec.corpus import load_case, names, source
from desdec.errors import ParseError
from desdec.io import (
    SCHEMA,
    automaton_from_dict,
    automaton_to_dict,
    dumps,
    load,
    parse_automata,
    parse_automaton,
    report,
    to_dot,
    write_automaton,
)

from .conftest import automata

GOOD = """\
# comment
automaton t
states: q0 q1
initial: q0
transitions:
q0 a q1   # trailing comment
end
alphabet 1: a
alphabet 2: a
"""


def test_parse_basic():
    af = parse_automaton(GOOD)
    assert af.name == "t"
    assert af.automaton.transitions == (("q0", "a", "q1"),)
    assert af.alphabets.locals == (frozenset({"a"}), frozenset({"a"}))


def test_events_line_keeps_unused_events():
    af = parse_automaton("automaton t\nstates: q\ninitial: q\nevents: a b\ntransitions:\nq a q\nend\n")
    assert af.automaton.events == {"a", "b"} and af.alphabets is None


def test_multiple_blocks():
    text = GOOD + "\n" + GOOD.replace("automaton t", "automaton u")
    assert [f.name for f in parse_automata(text)] == ["t", "u"]
    with pytest.raises(ParseError, match="expected one automaton block"):
        parse_automaton(text)


BAD = [
    ("states: q0\n", 1, "expected 'automaton"),
    ("automaton t\nstates: q0\ninitial: q1\ntransitions:\nend\n", 3, "not declared"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a\nend\n", 5, "transition needs"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a qx\nend\n", 5, "unknown state"),
    ("automaton t\nstates: q0 q0\ninitial: q0\ntransitions:\nend\n", 2, "duplicate state"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a q0\n", 1, "missing 'transitions:'"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a q0\nend\nalphabet 2: a\n", 7, "indices"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a q0\nend\nalphabet 1: b\n", 5, "not in any alphabet"),
    ("automaton t\nstates: q0\ninitial: q0\nbogus: 1\ntransitions:\nend\n", 4, "unknown section"),
    ("automaton t\nstates: q0\ninitial: q0\nevents: b\ntransitions:\nq0 a q0\nend\n", 6, "not declared in 'events:'"),
    ("automaton t\nstates: q0\ninitial: q0\ntransitions:\nq0 a q0\nq0 a q0\nend\n", 1, "duplicate transition"),
    ("", None, "no automaton block"),
]


@pytest.mark.parametrize("text,line,msg", BAD)
def test_parse_errors_are_positioned(text, line, msg):
    with pytest.raises(ParseError, match=msg) as ex:
        parse_automata(text, "f.aut")
    assert ex.value.line == line
    assert str(ex.value).startswith("f.aut:")


@given(automata(deterministic=False))
def test_round_trip(A):
    text = write_automaton(A, "x")
    B = parse_automaton(text).automaton
    assert B == A
    assert automaton_from_dict(automaton_to_dict(A)) == A


@pytest.mark.parametrize("name", names())
def test_corpus_round_trip(name):
    af = load_case(name)
    back = parse_automaton(write_automaton(af), "x")
    assert back.automaton == af.automaton and back.alphabets == af.alphabets


def test_load_file(tmp_path):
    p = tmp_path / "a.aut"
    p.write_text(source("ex_chain"))
    assert load(p).automaton == load_case("ex_chain").automaton


def test_dot():
    A = Automaton.from_transitions("q0", [("q0", "a", "q1"), ("q0", "b", "q1"), ("q1", 'c', "q0")])
    dot = to_dot(A, "g")
    assert dot.startswith('digraph "g" {')
    assert '"q0" -> "q1" [label="a, b"];' in dot
    assert "__start -> \"q0\";" in dot


def test_report_deterministic():
    rep = report(["check", "x"], {"b": 1, "a": [1, 2]}, {"seconds": 0.1})
    assert rep["schema"] == SCHEMA
    a, b = dumps(rep), dumps(json.loads(dumps(rep)))
    assert a == b and a.index('"a"') < a.index('"b"')


def test_alphabet_system_equality():
    al = AlphabetSystem(({"a"}, {"a", "b"}))
    assert al == AlphabetSystem((frozenset({"a"}), frozenset({"b", "a"})))
