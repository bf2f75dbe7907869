import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from desdec import Automaton
from desdec.corpus import load_case

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def case():
    return load_case


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def automata(draw, max_states=6, events=("a", "b", "c"), deterministic=True, min_states=1):
    """Accessible-or-not automata over a small alphabet."""
    n = draw(st.integers(min_states, max_states))
    states = [f"s{i}" for i in range(n)]
    trans = set()
    for i in range(n):
        for e in events:
            if deterministic:
                j = draw(st.integers(-1, n - 1))
                if j >= 0:
                    trans.add((states[i], e, states[j]))
            else:
                for j in draw(st.sets(st.integers(0, n - 1), max_size=2)):
                    trans.add((states[i], e, states[j]))
    return Automaton(tuple(states), states[0], frozenset(events), tuple(trans))


_ACCEPTANCE = {}


@pytest.fixture
def record():
    """``record(n, ok, detail)``: one acceptance line, echoed in the terminal summary."""

    def add(n, ok, detail):
        _ACCEPTANCE[n] = (ok, detail)
        print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")

    return add


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
