import importlib.util
from pathlib import Path

import pytest

from desdec import kernels

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


@pytest.mark.skipif(kernels.numba_backend is None, reason="numba not importable")
def test_benchmark_runs(capsys):
    spec = importlib.util.spec_from_file_location("bench_kernels", BENCH)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--sizes", "12", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "refine_partition" in out and "greatest_simulation" in out
