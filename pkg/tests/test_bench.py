import io

import numpy as np
import pytest

from qcemu import bench


def test_median_time_counts_calls():
    calls = []
    t = bench.median_time(lambda: calls.append(1), reps=5, warmup=1)
    assert len(calls) == 6 and t >= 0
    with pytest.raises(ValueError):
        bench.median_time(lambda: None, reps=0)


def test_random_register_state_has_clear_c():
    s = bench.random_register_state(2, np.random.default_rng(0))
    assert np.count_nonzero(s.amps[16:]) == 0
    assert abs(np.linalg.norm(s.amps) - 1) < 1e-12


def test_qubits_needed():
    assert bench.qubits_needed("qft", 12) == 12
    assert bench.qubits_needed("mul", 5) == 21
    assert bench.qubits_needed("div", 3) == 18
    assert bench.qubits_needed("qpe", 4, b=6) == 10


def test_qpe_suite_rows():
    rows = bench.run_suite("qpe", [3], reps=1, b=4)
    assert [r["mode"] for r in rows] == ["simulate", "square", "eigen"]
    assert rows[0]["speedup"] == 1.0


def test_write_rows_format():
    buf = io.StringIO()
    bench.write_rows([{"suite": "qft", "size": 4, "mode": "emulate", "median_s": 1.23456789e-5, "speedup": 3.0}],
                     buf, bench.BENCH_FIELDS)
    assert buf.getvalue().splitlines() == ["suite,size,mode,median_s,speedup", "qft,4,emulate,1.23457e-05,3"]


def test_step_timings_keys():
    t = bench.qpe_step_timings(3, reps=1)
    assert set(t) == {"apply_u_s", "dense_construction_s", "matmul_s", "eigensolver_s"}
    assert all(v > 0 for v in t.values())


def test_analytic_crossover_rows():
    rows = bench.analytic_crossover([8, 14])
    assert rows[0] == {"n": 8, "crossover_bits_squaring": 16, "crossover_bits_eigen": 12, "mode": "analytic"}
