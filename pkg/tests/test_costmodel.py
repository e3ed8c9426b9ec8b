import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcemu.costmodel import (Calibration, MachineParams, calibrate, crossover_bits, crossover_from_timings,
                             fft_comm_time, qft_comm_time, qpe_costs, t_fft, t_qft)
from qcemu.errors import DegenerateFitError

SINGLE_NODE = MachineParams(b_net=math.inf)

# per-step timings for the TFIM workload, n = 8..14, and the crossover rows
# derived from them (published single-node measurements)
TABLE_T_APPLY = [1.44e-4, 1.60e-4, 1.80e-4, 2.11e-4, 2.44e-4, 3.46e-4, 4.92e-4]
TABLE_T_DENSE = [7.60e-4, 3.46e-3, 1.55e-2, 6.88e-2, 3.02e-1, 1.32, 5.69]
TABLE_T_GEMM = [8.39e-4, 6.71e-3, 5.37e-2, 4.29e-1, 3.44, 2.75e1, 2.20e2]
TABLE_T_EIG = [9.60e-2, 5.27e-1, 1.70, 6.72, 3.22e1, 1.80e2, 9.01e2]
TABLE_SQUARING = [6, 9, 12, 15, 18, 21, 24]
TABLE_EIGEN = [10, 12, 14, 15, 18, 19, 21]


def test_defaults():
    m = MachineParams()
    assert m.flops_achieved == 20e9
    assert m.b_mem == 40e9
    assert m.b_net == 56e9 / 8


def test_machine_params_validation():
    with pytest.raises(ValueError):
        MachineParams(eff_fft=1.5)
    with pytest.raises(ValueError):
        MachineParams(b_mem=0)


def test_config_file():
    m = MachineParams.from_config("# desk box\nflops_peak = 1e11\neff_fft=0.2  # tuned\n\np = 4\n")
    assert (m.flops_peak, m.eff_fft, m.p, m.b_mem) == (1e11, 0.2, 4, 40e9)
    with pytest.raises(ValueError, match="line 1"):
        MachineParams.from_config("bandwidth = 3")


def test_t_fft_examples():
    compute = 5 * 2**28 * 28 / 20e9
    assert t_fft(28, SINGLE_NODE) == pytest.approx(compute, rel=1e-15)
    assert compute == pytest.approx(1.879, abs=1e-3)
    m = MachineParams()
    assert t_fft(1, m) == pytest.approx(10 / m.flops_achieved + 96 / m.b_net)
    fast = MachineParams(b_net=2 * m.b_net)
    assert t_fft(20, m) - t_fft(20, fast) == pytest.approx(fft_comm_time(20, m) / 2)


def test_t_qft_single_node_has_no_communication():
    assert qft_comm_time(20, MachineParams(p=1)) == 0
    assert t_qft(20, MachineParams(p=1)) == 4 * 2**20 * 400 / 40e9


@pytest.mark.parametrize("n", [10, 20, 28, 34])
def test_single_node_ratio_identity(n):
    # the two formulas' constants (5 flops, 4 bytes) leave a factor 4/5
    m = SINGLE_NODE
    assert t_qft(n, m) / t_fft(n, m) == pytest.approx(0.8 * n * m.flops_achieved / m.b_mem, rel=1e-14)


@pytest.mark.parametrize("p", [2, 4, 8, 16, 1024])
def test_communication_ratio(p):
    m = MachineParams(p=p)
    assert qft_comm_time(24, m) / fft_comm_time(24, m) == pytest.approx(math.log2(p) / 3, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 6), st.sampled_from(["flops_peak", "b_mem", "b_net"]))
def test_models_monotone(n, logp, param):
    m = MachineParams(p=2**logp)
    assert t_fft(n + 1, m) > t_fft(n, m) and t_qft(n + 1, m) > t_qft(n, m)
    faster = MachineParams(**{**m.__dict__, param: getattr(m, param) * 2})
    assert t_fft(n, faster) <= t_fft(n, m) and t_qft(n, faster) <= t_qft(n, m)
    if param != "b_net":
        assert t_fft(n, faster) < t_fft(n, m) or t_qft(n, faster) < t_qft(n, m)
    elif logp:
        assert t_qft(n, faster) < t_qft(n, m)


def test_qpe_costs_expressions():
    c = qpe_costs(8, 10, 29)
    assert c.simulate == 29 * 2.0**18
    assert c.square == 29 * 2.0**16 + 10 * 2.0**24
    assert c.eigen == 29 * 2.0**16 + 2.0**24
    assert qpe_costs(8, 10, 29, coherent=True).simulate == 29 * 2.0**28
    assert qpe_costs(8, 10, 29, strassen=True).square == pytest.approx(29 * 2.0**16 + 10 * 2.0 ** (8 * math.log2(7)))
    with pytest.raises(ValueError):
        qpe_costs(0, 1, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(1, 60), st.integers(1, 500), st.booleans(), st.booleans())
def test_qpe_costs_monotone(n, b, G, coherent, strassen):
    c = qpe_costs(n, b, G, coherent, strassen)
    for bigger in (qpe_costs(n + 1, b, G, coherent, strassen), qpe_costs(n, b + 1, G, coherent, strassen),
                   qpe_costs(n, b, G + 1, coherent, strassen)):
        assert bigger.simulate >= c.simulate and bigger.square >= c.square and bigger.eigen >= c.eigen


def test_squaring_threshold_tends_to_two_n():
    ratios = [crossover_bits(n, 4 * n - 3, "square") / n for n in (8, 16, 32, 64)]
    assert all(a >= b for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 2) < 0.1


def test_strassen_threshold_near_1_8_n():
    n = 64
    assert abs(crossover_bits(n, 4 * n - 3, "square", strassen=True) / n - (math.log2(7) - 1)) < 0.1


def test_coherent_eigen_threshold_near_n():
    n = 64
    assert abs(crossover_bits(n, 4 * n - 3, "eigen", coherent=True) / n - 1) < 0.1


def test_analytic_crossovers_monotone():
    sq = [crossover_bits(n, 4 * n - 3, "square") for n in range(8, 15)]
    eig = [crossover_bits(n, 4 * n - 3, "eigen") for n in range(8, 15)]
    assert sq == sorted(sq) and eig == sorted(eig)
    assert sq[0] == 16 and eig[0] == 12


def test_crossover_from_published_timings():
    got = [crossover_from_timings(*row) for row in zip(TABLE_T_APPLY, TABLE_T_DENSE, TABLE_T_GEMM, TABLE_T_EIG)]
    assert [s for s, _ in got] == TABLE_SQUARING
    assert [e for _, e in got] == TABLE_EIGEN


def test_crossover_none_when_never_cheaper():
    assert crossover_from_timings(1e-9, 1.0, 1.0, 1.0, b_max=10) == (None, None)


def synthetic(m, ns, path):
    f = t_fft if path == "fft" else t_qft
    return [(n, f(n, m)) for n in ns]


def test_calibrate_round_trip():
    truth = MachineParams(flops_peak=3.3e11, eff_fft=0.1, b_mem=27e9, b_net=4.5e9, p=8)
    ns = range(16, 30)
    cal = calibrate({"fft": synthetic(truth, ns, "fft"), "qft": synthetic(truth, ns, "qft")}, p=8)
    assert cal.flops_achieved == pytest.approx(truth.flops_achieved, rel=0.01)
    assert cal.b_mem == pytest.approx(truth.b_mem, rel=0.01)
    assert cal.b_net == pytest.approx(truth.b_net, rel=0.01)
    assert cal.absent == []
    back = cal.to_machine_params(truth)
    assert t_fft(25, back) == pytest.approx(t_fft(25, truth), rel=0.01)


def test_calibrate_single_path():
    cal = calibrate({"qft": synthetic(MachineParams(), range(10, 20), "qft")})
    assert cal.b_mem == pytest.approx(40e9, rel=1e-6)
    assert set(cal.absent) == {"flops_achieved", "b_net"}


def test_calibrate_degenerate():
    with pytest.raises(DegenerateFitError):
        calibrate({})
    with pytest.raises(DegenerateFitError):
        calibrate({"fft": [(20, 1.0)]})
    with pytest.raises(DegenerateFitError):
        calibrate({"fft": [(20, 1.0), (20, 1.0)]})
