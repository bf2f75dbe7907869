"""Text format for automata, DOT export and JSON report helpers.

Format (line oriented, ``#`` starts a comment)::

    automaton ex_chain
    states: q0 q1 q2
    initial: q0
    events: e1 e2          # optional; defaults to the alphabet union or used events
    transitions:
    q0 e1 q1
    q1 e2 q2
    end
    alphabet 1: e1
    alphabet 2: e2

A file may hold several ``automaton`` blocks; alphabet lines attach to the
block they follow.
"""

from __future__ import annotations

import dataclasses
import json

from .automaton import AlphabetSystem, Automaton, check_event
from .errors import AutomatonError, ParseError

SCHEMA = "desdec.report/1"


@dataclasses.dataclass(frozen=True)
class AutomatonFile:
    name: str
    automaton: Automaton
    alphabets: AlphabetSystem | None = None


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_automata(text: str, source: str | None = None) -> list:
    """Parse every ``automaton`` block in ``text``."""
    out = []
    lines = text.splitlines()
    i = 0
    n = len(lines)

    def err(msg, lineno):
        return ParseError(msg, lineno, source)

    while i < n:
        line = _strip(lines[i])
        i += 1
        if not line:
            continue
        head = line.split()
        if head[0] != "automaton":
            if head[0] == "alphabet":
                raise err("alphabet line outside an automaton block", i)
            raise err(f"expected 'automaton <name>', got {line!r}", i)
        if len(head) != 2:
            raise err("expected exactly one name after 'automaton'", i)
        name = head[1]
        start_line = i
        states = initial = events = None
        state_line = {}
        trans = []
        in_trans = False
        closed = False
        while i < n:
            raw = _strip(lines[i])
            i += 1
            if not raw:
                continue
            if in_trans:
                if raw == "end":
                    closed = True
                    break
                parts = raw.split()
                if len(parts) != 3:
                    raise err(f"transition needs '<src> <event> <dst>', got {raw!r}", i)
                trans.append((parts, i))
                continue
            key, sep, rest = raw.partition(":")
            key = key.strip()
            vals = rest.split()
            if raw == "end":
                raise err("'end' before 'transitions:'", i)
            if not sep:
                raise err(f"expected a 'key:' line, got {raw!r}", i)
            if key == "states":
                if states is not None:
                    raise err("duplicate 'states:' line", i)
                if not vals:
                    raise err("'states:' needs at least one state", i)
                states = vals
                for v in vals:
                    if v in state_line:
                        raise err(f"duplicate state {v!r}", i)
                    state_line[v] = i
            elif key == "initial":
                if initial is not None:
                    raise err("duplicate 'initial:' line", i)
                if len(vals) != 1:
                    raise err("'initial:' needs exactly one state", i)
                initial = (vals[0], i)
            elif key == "events":
                if events is not None:
                    raise err("duplicate 'events:' line", i)
                events = (vals, i)
            elif key == "transitions":
                if vals:
                    raise err("transitions go on the lines after 'transitions:'", i)
                in_trans = True
            else:
                raise err(f"unknown section {key!r}", i)
        if not closed:
            raise err(f"automaton {name!r}: missing 'transitions:' ... 'end'", start_line)
        if states is None:
            raise err(f"automaton {name!r}: missing 'states:'", start_line)
        if initial is None:
            raise err(f"automaton {name!r}: missing 'initial:'", start_line)
        if initial[0] not in state_line:
            raise err(f"initial state {initial[0]!r} is not declared", initial[1])
        for (src, ev, dst), ln in trans:
            for q in (src, dst):
                if q not in state_line:
                    raise err(f"unknown state {q!r}", ln)
            try:
                check_event(ev)
            except AutomatonError as ex:
                raise err(str(ex), ln) from None

        # trailing alphabet lines
        alph = {}
        while i < n:
            raw = _strip(lines[i])
            if not raw:
                i += 1
                continue
            if not raw.startswith("alphabet"):
                break
            i += 1
            key, sep, rest = raw.partition(":")
            parts = key.split()
            if not sep or len(parts) != 2 or not parts[1].isdigit():
                raise err(f"expected 'alphabet <i>: <events>', got {raw!r}", i)
            k = int(parts[1])
            if k in alph:
                raise err(f"duplicate alphabet {k}", i)
            if not rest.split():
                raise err(f"alphabet {k} is empty", i)
            alph[k] = (rest.split(), i)

        alphabets = None
        if alph:
            keys = sorted(alph)
            if keys != list(range(1, len(keys) + 1)):
                raise err(f"alphabet indices must be 1..{len(keys)}, got {keys}", alph[keys[-1]][1])
            try:
                alphabets = AlphabetSystem(tuple(frozenset(alph[k][0]) for k in keys))
            except AutomatonError as ex:
                raise err(str(ex), alph[keys[0]][1]) from None
            union = alphabets.global_events
            for (_, ev, _), ln in trans:
                if ev not in union:
                    raise err(f"event {ev!r} is not in any alphabet", ln)
        used = {ev for (_, ev, _), _ in trans}
        if events is not None:
            ev_set = set(events[0])
            missing = used - ev_set
            if missing:
                bad = next(ln for (_, ev, _), ln in trans if ev in missing)
                raise err(f"event {sorted(missing)[0]!r} is not declared in 'events:'", bad)
            if alphabets is not None and ev_set != alphabets.global_events:
                raise err("'events:' differs from the union of the alphabets", events[1])
        elif alphabets is not None:
            ev_set = set(alphabets.global_events)
        else:
            ev_set = used
        try:
            A = Automaton(tuple(states), initial[0], frozenset(ev_set), tuple(tuple(t) for t, _ in trans))
        except AutomatonError as ex:
            raise err(str(ex), start_line) from None
        out.append(AutomatonFile(name, A, alphabets))
    if not out:
        raise ParseError("no automaton block found", None, source)
    return out


def parse_automaton(text: str, source: str | None = None) -> AutomatonFile:
    """Parse a file that must contain exactly one automaton block."""
    files = parse_automata(text, source)
    if len(files) != 1:
        raise ParseError(f"expected one automaton block, found {len(files)}", None, source)
    return files[0]


def load(path) -> AutomatonFile:
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read(), str(path))


def write_automaton(af, name: str | None = None, alphabets=None) -> str:
    """Serialize an :class:`AutomatonFile` (or a bare automaton) to text."""
    if isinstance(af, Automaton):
        af = AutomatonFile(name or "A", af, alphabets)
    A = af.automaton
    lines = [
        f"automaton {af.name}",
        "states: " + " ".join(A.states),
        f"initial: {A.initial}",
        "events: " + " ".join(A.event_list),
        "transitions:",
    ]
    lines += [f"{s} {e} {d}" for s, e, d in A.transitions]
    lines.append("end")
    if af.alphabets is not None:
        for i, E in enumerate(af.alphabets.locals, start=1):
            lines.append(f"alphabet {i}: " + " ".join(sorted(E)))
    return "\n".join(lines) + "\n"


def _dot_id(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(A: Automaton, name: str = "A") -> str:
    """Plain DOT digraph; parallel edges between a pair are merged into one label."""
    out = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in A.states:
        out.append(f"  {_dot_id(q)} [shape=circle];")
    out.append(f"  __start -> {_dot_id(A.initial)};")
    labels = {}
    for s, e, d in A.transitions:
        labels.setdefault((s, d), []).append(e)
    for (s, d), evs in labels.items():
        out.append(f"  {_dot_id(s)} -> {_dot_id(d)} [label={_dot_id(', '.join(evs))}];")
    out.append("}")
    return "\n".join(out) + "\n"


def automaton_to_dict(A: Automaton, name: str | None = None) -> dict:
    d = {
        "states": list(A.states),
        "initial": A.initial,
        "events": list(A.event_list),
        "transitions": [list(t) for t in A.transitions],
    }
    if name is not None:
        d = {"name": name, **d}
    return d


def automaton_from_dict(d) -> Automaton:
    return Automaton(tuple(d["states"]), d["initial"], frozenset(d["events"]), tuple(tuple(t) for t in d["transitions"]))


def report(command, result, timing=None) -> dict:
    rep = {"schema": SCHEMA, "command": list(command), "result": result}
    if timing is not None:
        rep["timing"] = timing
    return rep


def dumps(rep) -> str:
    return json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
