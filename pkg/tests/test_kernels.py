import os
import subprocess
import sys

import numpy as np
import pytest

from desdec import kernels
from desdec.decompose import _completable, _event_kinds
from desdec.generate import random_automaton, random_split

nb = kernels.numba_backend
np_ = kernels.numpy_backend

needs_numba = pytest.mark.skipif(nb is None, reason="numba not importable")


def _random_arrays(rng, n, n_events, m):
    src = rng.integers(0, n, m)
    ev = rng.integers(0, n_events, m)
    dst = rng.integers(0, n, m)
    return src.astype(np.int64), ev.astype(np.int64), dst.astype(np.int64)


def test_canonical_blocks_numpy():
    out = np_.canonical_blocks(np.array([5, 5, 2, 9, 2]))
    assert out.tolist() == [0, 0, 1, 2, 1]
    assert np_.canonical_blocks(np.array([], dtype=np.int64)).size == 0


@needs_numba
class TestBackendsAgree:
    def test_canonical_blocks(self, rng):
        for _ in range(50):
            b = rng.integers(0, 7, int(rng.integers(0, 30)))
            assert np.array_equal(nb.canonical_blocks(b), np_.canonical_blocks(b))

    def test_refine_partition(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 25))
            k = int(rng.integers(1, 4))
            src, ev, dst = _random_arrays(rng, n, k, int(rng.integers(0, 3 * n)))
            init = rng.integers(0, 2, n).astype(np.int64)
            a = nb.refine_partition(n, src, ev, dst, k, init)
            b = np_.refine_partition(n, src, ev, dst, k, init)
            assert np.array_equal(a, b)

    def test_greatest_simulation(self, rng):
        for _ in range(200):
            n1, n2 = int(rng.integers(1, 12)), int(rng.integers(1, 12))
            k = int(rng.integers(1, 4))
            a1 = _random_arrays(rng, n1, k, int(rng.integers(0, 2 * n1)))
            a2 = _random_arrays(rng, n2, k, int(rng.integers(0, 2 * n2)))
            x = nb.greatest_simulation(n1, *a1, n2, *a2, k)
            y = np_.greatest_simulation(n1, *a1, n2, *a2, k)
            assert x.dtype == y.dtype == np.bool_
            assert np.array_equal(x, y)

    def test_dc3_search(self, rng):
        compared = 0
        for _ in range(300):
            events = [f"e{i}" for i in range(int(rng.integers(2, 6)))]
            A = random_automaton(rng, int(rng.integers(2, 9)), events, density=0.5)
            E1, E2 = random_split(rng, sorted(A.events))
            common = sorted(E1 & E2)
            if not common:
                continue
            order = A.event_list
            delta = A.delta_table(order)
            kind = _event_kinds(order, E1, E2)
            for a in common:
                ai = order.index(a)
                comp = _completable(delta, kind, ai)
                roots = np.flatnonzero(comp).astype(np.int64)
                if roots.size == 0:
                    continue
                x = nb.dc3_search(delta, kind, comp, ai, roots, 10**7)
                y = np_.dc3_search(delta, kind, comp, ai, roots, 10**7)
                for u, v in zip(x, y):
                    assert np.array_equal(u, v)
                compared += 1
        assert compared > 50

    def test_dc3_search_limit(self, rng):
        A = random_automaton(rng, 8, ["a", "b", "c"], density=0.8)
        delta = A.delta_table()
        kind = np.array([1, 2, 3])
        comp = _completable(delta, kind, 2)
        roots = np.flatnonzero(comp).astype(np.int64)
        if roots.size:
            for be in (nb, np_):
                with pytest.raises(MemoryError):
                    be.dc3_search(delta, kind, comp, 2, roots, 1)


def test_refine_partition_known():
    # 0 -a-> 1, 2 -a-> 3 ; 1 and 3 dead, 0 and 2 equivalent, 4 isolated dead
    src = np.array([0, 2]); ev = np.array([0, 0]); dst = np.array([1, 3])
    out = kernels.refine_partition(5, src, ev, dst, 1, np.zeros(5, dtype=np.int64))
    assert out[0] == out[2] and out[1] == out[3] == out[4] and out[0] != out[1]


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("DESDEC_NUMBA", None)
    else:
        env["DESDEC_NUMBA"] = flag
    res = subprocess.run(
        [sys.executable, "-c", "import desdec; print(desdec.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    return res.stdout.strip()


@pytest.mark.parametrize("flag,expect", [("0", "numpy"), ("off", "numpy"), ("1", "numba"), (None, "numba")])
def test_env_flag(flag, expect):
    if nb is None and expect == "numba":
        expect = "numpy"
    assert _backend_in_subprocess(flag) == expect


def test_numpy_backend_end_to_end():
    code = (
        "from desdec.corpus import run_all; import desdec;"
        "assert desdec.BACKEND == 'numpy';"
        "print(sum(r.ok for r in run_all()), len(run_all()))"
    )
    env = dict(os.environ, DESDEC_NUMBA="0")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    ok, total = map(int, res.stdout.split())
    assert ok == total
