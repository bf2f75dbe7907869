"""Command line interface: ``desdec <command> ...``.

Exit codes: 0 holds / success, 1 fails (witnesses printed), 2 usage or
parse error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .automaton import as_string, format_string
from .compose import interleave, parallel_many, project_automaton
from .decompose import decompose_two
from .equivalence import bisimilar, simulates
from .errors import DesdecError, ParseError, ResourceLimitError
from .hierarchy import hierarchical_decompose, universal_controller, verify_closed_loop
from .io import automaton_to_dict, dumps, load, report, to_dot, write_automaton

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _need_alphabets(af, path):
    if af.alphabets is None:
        raise UsageError(f"{path}: no 'alphabet <i>:' lines")
    return af.alphabets


def _parse_indices(text, n):
    try:
        idx = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad agent list {text!r}") from None
    for i in idx:
        if not 1 <= i <= n:
            raise UsageError(f"agent index {i} out of range 1..{n}")
    return idx


def parse_split(text, n):
    """``"1/2,3"`` -> ([1], [2, 3]); ``"i,j"`` with two entries means ``i/j``."""
    if "/" in text:
        left, right = text.split("/", 1)
        L, R = _parse_indices(left, n), _parse_indices(right, n)
    else:
        idx = _parse_indices(text, n)
        if len(idx) != 2:
            raise UsageError("--split needs 'i,j' or 'A/B' groups")
        L, R = [idx[0]], [idx[1]]
    if not L or not R or set(L) & set(R) or set(L) | set(R) != set(range(1, n + 1)):
        raise UsageError(f"--split {text!r} must put every agent 1..{n} in exactly one group")
    return L, R


def _emit_automaton(A, name, args, out):
    if getattr(args, "dot", False):
        out.write(to_dot(A, name))
    else:
        out.write(write_automaton(A, name))


# -- commands ------------------------------------------------------------------


def cmd_project(args, out):
    af = load(args.file)
    if args.events:
        E = frozenset(args.events.split())
        label = "custom"
    else:
        alph = _need_alphabets(af, args.file)
        if args.agent is None or not 1 <= args.agent <= alph.n:
            raise UsageError("give --agent i (1-based) or --events")
        E = alph[args.agent]
        label = str(args.agent)
    P = project_automaton(af.automaton, E)
    name = f"{af.name}_P{label}"
    if args.json:
        return EXIT_OK, {"automaton": automaton_to_dict(P, name)}
    _emit_automaton(P, name, args, out)
    return EXIT_OK, None


def cmd_compose(args, out):
    files = [load(p) for p in args.files]
    C = parallel_many([f.automaton for f in files])
    name = "_".join(f.name for f in files)
    if args.json:
        return EXIT_OK, {"automaton": automaton_to_dict(C, name)}
    _emit_automaton(C, name, args, out)
    return EXIT_OK, None


def _relation_cmd(args, out, fn, word):
    A1, A2 = load(args.left).automaton, load(args.right).automaton
    R = fn(A1, A2)
    ok = R is not None
    if args.json:
        return (EXIT_OK if ok else EXIT_FAIL), {
            "holds": ok,
            "relation": [list(p) for p in R] if ok else None,
        }
    out.write(f"{word}: {'yes' if ok else 'no'}\n")
    if ok and args.relation:
        for p, q in R:
            out.write(f"  {p} ~ {q}\n")
    return (EXIT_OK if ok else EXIT_FAIL), None


def cmd_bisim(args, out):
    return _relation_cmd(args, out, bisimilar, "bisimilar")


def cmd_simulate(args, out):
    return _relation_cmd(args, out, simulates, "simulated (left ≺ right)")


def cmd_interleave(args, out):
    s, s2 = as_string(args.left), as_string(args.right)
    common = set(as_string(args.common or ""))
    E1 = set(as_string(args.e1)) if args.e1 else set(s) | common
    E2 = set(as_string(args.e2)) if args.e2 else set(s2) | common
    L = interleave(s, s2, E1, E2)
    maximal = sorted(L.maximal(), key=lambda w: (len(w), w))
    strings = sorted(L.strings(), key=lambda w: (len(w), w))
    if args.json:
        return EXIT_OK, {
            "left": list(s),
            "right": list(s2),
            "maximal": [list(w) for w in maximal],
            "strings": [list(w) for w in strings],
        }
    out.write("maximal: " + ", ".join(format_string(w) for w in maximal) + "\n")
    out.write("closure: {" + ", ".join(format_string(w) for w in strings) + "}\n")
    return EXIT_OK, None


def _split_events(alph, L, R):
    return alph.union(L), alph.union(R)


def cmd_check(args, out):
    af = load(args.file)
    alph = _need_alphabets(af, args.file)
    if alph.n < 2:
        raise UsageError("check needs at least two alphabets")
    if args.split:
        splits = [parse_split(args.split, alph.n)]
    elif alph.n == 2:
        splits = [([1], [2])]
    else:
        splits = [([k], [j for j in range(1, alph.n + 1) if j != k]) for k in range(1, alph.n + 1)]
    results = []
    all_ok = True
    for L, R in splits:
        E1, E2 = _split_events(alph, L, R)
        verdict, _ = decompose_two(af.automaton, E1, E2, strict=False)
        all_ok &= verdict.holds
        label = ",".join(map(str, L)) + "/" + ",".join(map(str, R))
        results.append({"split": label, **verdict.to_dict()})
        if not args.json:
            out.write(f"split {label}: {'decomposable' if verdict.holds else 'not decomposable'}\n")
            for c in verdict.checks:
                tag = "holds" if c.holds else "fails"
                extra = "" if c.exact else " (bounded)"
                out.write(f"  {c.condition}: {tag}{extra}\n")
                for w in c.witnesses:
                    out.write(f"    witness: {w.describe()}\n")
            if not verdict.consistent:
                out.write("  note: the conditions disagree with the oracle on this input; the oracle verdict is used\n")
    code = EXIT_OK if all_ok else EXIT_FAIL
    return code, ({"splits": results} if args.json else None)


def cmd_decompose(args, out):
    af = load(args.file)
    alph = _need_alphabets(af, args.file)
    order = _parse_indices(args.order, alph.n) if args.order else None
    res = hierarchical_decompose(af.automaton, alph, order=order, exhaustive=args.exhaustive)
    code = EXIT_OK if res.complete else EXIT_FAIL
    if args.json:
        return code, {
            "complete": res.complete,
            "order": list(res.order),
            "locals": [
                {"agent": k, "events": sorted(E), "automaton": automaton_to_dict(X, f"{af.name}_P{k}")}
                for k, E, X in res.locals
            ],
            "residual": None
            if res.residual is None
            else {"agents": list(res.residual_agents), "automaton": automaton_to_dict(res.residual)},
        }
    out.write(f"{'complete' if res.complete else 'incomplete'}; order {' '.join(map(str, res.order)) or '-'}\n")
    for k, E, X in res.locals:
        out.write(f"  agent {k}: {X.n_states} states, {len(X.transitions)} transitions\n")
    if res.residual is not None:
        agents = ",".join(map(str, res.residual_agents))
        out.write(f"  residual over agents {agents}: {res.residual.n_states} states\n")
        out.write("  no decomposition found under the searched orders\n")
    if args.emit:
        for k, _, X in res.locals:
            out.write("\n")
            _emit_automaton(X, f"{af.name}_P{k}", args, out)
    return code, None


def cmd_verify_closedloop(args, out):
    spec = load(args.spec)
    alph = _need_alphabets(spec, args.spec)
    plants = [load(p).automaton for p in args.plants]
    if args.controllers:
        ctrls = []
        for i, p in enumerate(args.controllers, start=1):
            if p == "universal":
                if i > alph.n:
                    raise UsageError("more controllers than agents")
                ctrls.append(universal_controller(alph[i], f"c{i}"))
            else:
                ctrls.append(load(p).automaton)
    else:
        ctrls = [universal_controller(alph[i], f"c{i}") for i in range(1, alph.n + 1)]
    v = verify_closed_loop(spec.automaton, plants, ctrls, alph, mode=args.mode)
    code = EXIT_OK if v.holds else EXIT_FAIL
    if args.json:
        return code, v.to_dict()
    for i, ok in enumerate(v.agents, start=1):
        out.write(f"agent {i}: {'holds' if ok else 'fails'}\n")
    out.write(f"global ({args.mode}): {'holds' if v.global_holds else 'fails'}\n")
    return code, None


def cmd_corpus(args, out):
    from . import corpus

    if args.list:
        for n in corpus.names():
            out.write(n + "\n")
        return EXIT_OK, None
    names = args.cases or corpus.names()
    unknown = [n for n in names if n not in corpus.golden()]
    if unknown:
        raise UsageError(f"unknown corpus case(s): {', '.join(unknown)}")
    results = [corpus.run_case(n) for n in names]
    ok = all(r.ok for r in results)
    if args.json:
        return (EXIT_OK if ok else EXIT_FAIL), {"cases": [r.to_dict() for r in results], "all_match": ok}
    for r in results:
        verdict = "decomposable" if r.decomposable else "not decomposable"
        failed = f" [{', '.join(r.failed)}]" if r.failed else ""
        out.write(f"{'ok  ' if r.ok else 'FAIL'} {r.name}: {verdict}{failed}\n")
        for p in r.problems:
            out.write(f"       {p}\n")
    out.write(f"{sum(r.ok for r in results)}/{len(results)} cases match\n")
    return (EXIT_OK if ok else EXIT_FAIL), None


def build_parser():
    p = _Parser(prog="desdec", description="Decomposability of task automata over distributed alphabets.")
    p.add_argument("--version", action="version", version=f"desdec {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        sp.set_defaults(func=fn)
        return sp

    sp = add("project", cmd_project, "natural projection onto one local event set")
    sp.add_argument("file")
    sp.add_argument("--agent", type=int)
    sp.add_argument("--events", help="explicit event list instead of --agent")
    sp.add_argument("--dot", action="store_true")

    sp = add("compose", cmd_compose, "parallel composition of several automata")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--dot", action="store_true")

    for name, fn, h in (("bisim", cmd_bisim, "bisimilarity"), ("simulate", cmd_simulate, "left ≺ right")):
        sp = add(name, fn, h)
        sp.add_argument("left")
        sp.add_argument("right")
        sp.add_argument("--relation", action="store_true", help="print the witness relation")

    sp = add("interleave", cmd_interleave, "interleaving of two strings")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--common", help="common events (space separated)")
    sp.add_argument("--e1", help="left alphabet (default: left events plus common)")
    sp.add_argument("--e2", help="right alphabet (default: right events plus common)")

    sp = add("check", cmd_check, "DC1-DC4 and the oracle for a two-set split")
    sp.add_argument("file")
    sp.add_argument("--split", help="'i,j' or groups 'A/B', e.g. '1/2,3'")

    sp = add("decompose", cmd_decompose, "hierarchical decomposition")
    sp.add_argument("file")
    sp.add_argument("--order", help="candidate priority, e.g. '2,1,3'")
    sp.add_argument("--exhaustive", action="store_true", help="backtrack over candidate orders")
    sp.add_argument("--emit", action="store_true", help="print the local automata")
    sp.add_argument("--dot", action="store_true", help="with --emit, print DOT")

    sp = add("verify-closedloop", cmd_verify_closedloop, "closed-loop verification")
    sp.add_argument("spec")
    sp.add_argument("--plants", nargs="+", required=True)
    sp.add_argument("--controllers", nargs="+", help="files or 'universal' (default: all universal)")
    sp.add_argument("--mode", choices=("bisimulation", "simulation"), default="bisimulation")

    sp = add("corpus", cmd_corpus, "run the bundled examples against their golden verdicts")
    sp.add_argument("cases", nargs="*")
    sp.add_argument("--list", action="store_true")
    return p


def run_command(argv, out=None, err=None):
    """Run one command; returns ``(exit_code, report_or_None)``."""
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(argv)
    parser = build_parser()
    want_json = "--json" in argv
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        code, result = args.func(args, out)
    except UsageError as ex:
        err.write(f"desdec: {ex}\n")
        return EXIT_USAGE, None
    except ParseError as ex:
        err.write(f"desdec: parse error: {ex}\n")
        return EXIT_USAGE, None
    except ResourceLimitError as ex:
        err.write(f"desdec: resource limit: {ex}\n")
        return EXIT_LIMIT, None
    except OSError as ex:
        err.write(f"desdec: {ex}\n")
        return EXIT_USAGE, None
    except DesdecError as ex:
        err.write(f"desdec: {ex}\n")
        return EXIT_USAGE, None
    rep = None
    if want_json and result is not None:
        rep = report(argv, {"exit_code": code, **result}, {"seconds": round(time.perf_counter() - t0, 6)})
        out.write(dumps(rep))
    return code, rep


def main(argv=None):
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
