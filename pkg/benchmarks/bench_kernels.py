"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 50 200 400] [--repeat 3]

Outputs of the two backends are compared on every input before timing.
"""

import argparse
import time

import numpy as np

from desdec.decompose import _completable, _event_kinds
from desdec.generate import random_automaton
from desdec.kernels import numba_backend as nb
from desdec.kernels import numpy_backend as npb


def best_of(fn, repeat):
    out = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t0)
    return out


def cases(n, rng):
    events = [f"e{i}" for i in range(6)]
    A = random_automaton(rng, n, events, density=0.35, deterministic=False)
    B = random_automaton(rng, n, events, density=0.35, deterministic=False)
    src, ev, dst = A.arrays()
    k = len(A.event_list)
    init = np.zeros(A.n_states, dtype=np.int64)
    yield "refine_partition", lambda be: be.refine_partition(A.n_states, src, ev, dst, k, init)

    order = sorted(A.events | B.events)
    a, b = A.arrays(order), B.arrays(order)
    yield "greatest_simulation", lambda be: be.greatest_simulation(A.n_states, *a, B.n_states, *b, len(order))

    D = random_automaton(rng, max(2, n // 4), events, density=0.5)
    order = D.event_list
    delta = D.delta_table(order)
    E1 = set(order[: len(order) // 2 + 1])
    E2 = set(order[len(order) // 2 :])
    kind = _event_kinds(order, E1, E2)
    ai = next((i for i, e in enumerate(order) if kind[i] == 3), None)
    if ai is not None:
        comp = _completable(delta, kind, ai)
        roots = np.flatnonzero(comp).astype(np.int64)
        if roots.size:
            yield f"dc3_search(n={D.n_states})", lambda be: be.dc3_search(delta, kind, comp, ai, roots, 10**9)


def same(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(u, v) for u, v in zip(x, y))
    return np.array_equal(x, y)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if nb is None:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'states':>8}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in args.sizes:
        for name, run in cases(n, rng):
            assert same(run(nb), run(npb)), name  # also warms the JIT
            t_nb = best_of(lambda: run(nb), args.repeat)
            t_np = best_of(lambda: run(npb), args.repeat)
            print(f"{name:<24}{n:>8}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
