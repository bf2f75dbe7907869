"""Bundled example automata with golden verdicts.

``golden.json`` lists each case: the oracle verdict, the set of failed
conditions and optional extra expectations (languages, witnesses,
composition strings, hierarchy sizes). :func:`run_case` evaluates one case
and reports every mismatch.
"""

from __future__ import annotations

import dataclasses
import json
import time
from functools import lru_cache
from importlib import resources

from ..automaton import as_string, language_upto, path_automaton
from ..compose import parallel_many, project_automaton
from ..decompose import decompose_two, decomposable_oracle
from ..equivalence import bisimilar, isomorphic, language_equal
from ..hierarchy import hierarchical_decompose
from ..io import AutomatonFile, parse_automaton
from ..replay import replay


@lru_cache(maxsize=None)
def golden() -> dict:
    text = resources.files(__name__).joinpath("golden.json").read_text(encoding="utf-8")
    return {c["name"]: c for c in json.loads(text)["cases"]}


def names() -> list:
    return list(golden())


def source(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.aut").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_case(name: str) -> AutomatonFile:
    return parse_automaton(source(name), f"{name}.aut")


def robot_cycles() -> list:
    return [load_case(f"robot_r{i}").automaton for i in (1, 2, 3)]


@dataclasses.dataclass(frozen=True)
class CaseResult:
    name: str
    ok: bool
    decomposable: bool
    failed: tuple
    problems: tuple
    seconds: float
    verdict: object = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "decomposable": self.decomposable,
            "failed": list(self.failed),
            "problems": list(self.problems),
            "seconds": round(self.seconds, 6),
        }


def _strings(items):
    return {as_string(s) for s in items}


def _check_expect(exp, af, verdict, problems):
    A = af.automaton
    loc = af.alphabets.locals
    kind = exp["type"]
    if kind == "language_upto":
        got = language_upto(A, exp["k"])
        if got != _strings(exp["strings"]):
            problems.append(f"language_upto({exp['k']}) = {sorted(got)}")
    elif kind == "composition_language_upto":
        got = language_upto(parallel_many([project_automaton(A, E) for E in loc]), exp["k"])
        if got != _strings(exp["strings"]):
            problems.append(f"composition language_upto({exp['k']}) = {sorted(got)}")
    elif kind == "projection_states":
        n = project_automaton(A, loc[exp["agent"] - 1]).n_states
        if n != exp["n"]:
            problems.append(f"P{exp['agent']} has {n} states, expected {exp['n']}")
    elif kind == "projection_bisimilar_path":
        P = project_automaton(A, loc[exp["agent"] - 1])
        chain = path_automaton("x", exp["string"], P.events)
        if bisimilar(P, chain) is None:
            problems.append(f"P{exp['agent']} is not bisimilar to the path {exp['string']!r}")
    elif kind in ("bisimilar_to", "isomorphic_to"):
        other = load_case(exp["other"]).automaton
        got = bisimilar(A, other) is not None if kind == "bisimilar_to" else isomorphic(A, other)
        if got != exp["value"]:
            problems.append(f"{kind} {exp['other']} = {got}")
    elif kind == "relation_contains":
        other = load_case(exp["other"]).automaton
        R = bisimilar(A, other)
        missing = [p for p in exp["pairs"] if R is None or tuple(p) not in R]
        if missing:
            problems.append(f"bisimulation with {exp['other']} lacks {missing}")
    elif kind == "composition_contains":
        comp = parallel_many([project_automaton(A, E) for E in loc])
        for s in exp["strings"]:
            w = as_string(s)
            if not comp.defined(w) or A.defined(w):
                problems.append(f"{s!r} should be generated by the composition but not by A")
    elif kind == "language_equal_composition":
        got = language_equal(A, parallel_many([project_automaton(A, E) for E in loc]))
        if got != exp["value"]:
            problems.append(f"language_equal(A, composition) = {got}")
    elif kind == "witness":
        ws = [w for w in verdict.witnesses if w.condition == exp["condition"]] if verdict is not None else []
        ok = False
        for w in ws:
            if "state" in exp and w.state != exp["state"]:
                continue
            if "events" in exp and list(w.events) != exp["events"]:
                continue
            if "strings" in exp and [tuple(s) for s in w.strings] != [as_string(s) for s in exp["strings"]]:
                continue
            if "agent" in exp and w.agent != exp["agent"]:
                continue
            ok = True
        if not ok:
            problems.append(f"no {exp['condition']} witness matching {exp}; got {[w.describe() for w in ws]}")
    elif kind == "hierarchy":
        res = hierarchical_decompose(A, af.alphabets, order=exp["order"])
        sizes = [X.n_states for _, _, X in res.locals]
        if not res.complete or list(res.order) != exp["order"] or sizes != exp["sizes"]:
            problems.append(f"hierarchy order={res.order} sizes={sizes} complete={res.complete}")
    else:
        problems.append(f"unknown expectation {kind!r}")


def run_case(name: str) -> CaseResult:
    gold = golden()[name]
    t0 = time.perf_counter()
    af = load_case(name)
    A = af.automaton
    problems = []
    verdict = None
    if af.alphabets.n == 2:
        E1, E2 = af.alphabets.locals
        verdict, _ = decompose_two(A, E1, E2, strict=False)
        decomposable = verdict.holds
        failed = tuple(c for c in verdict.failed if c != "oracle")
        if verdict.consistent != gold.get("consistent", True):
            problems.append(f"consistent = {verdict.consistent}")
        for c in verdict.checks:
            for w in c.witnesses:
                if w.condition != "ORACLE" and not replay(A, E1, E2, w):
                    problems.append(f"witness does not replay: {w.describe()}")
    else:
        decomposable = decomposable_oracle(A, af.alphabets).holds
        failed = ()
    if decomposable != gold["decomposable"]:
        problems.append(f"decomposable = {decomposable}, expected {gold['decomposable']}")
    if sorted(failed) != sorted(gold["failed"]):
        problems.append(f"failed conditions {sorted(failed)}, expected {sorted(gold['failed'])}")
    for exp in gold.get("expect", ()):
        _check_expect(exp, af, verdict, problems)
    return CaseResult(name, not problems, decomposable, failed, tuple(problems), time.perf_counter() - t0, verdict)


def run_all() -> list:
    return [run_case(n) for n in names()]
