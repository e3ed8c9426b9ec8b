import csv
import io
import json

import pytest

from qcemu.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_qft(capsys):
    code, out, _ = run(capsys, "run", "--builtin", "qft", "--n", "6", "--mode", "compare", "--init", "random")
    assert code == 0
    assert float(out.split("distance=")[1].split()[0]) < 1e-10


@pytest.mark.parametrize("op,m", [("mul", 3), ("div", 2)])
def test_compare_arithmetic(capsys, op, m):
    code, out, _ = run(capsys, "run", "--builtin", op, "--m", str(m), "--mode", "compare", "--init", "uniform")
    assert code == 0 and "distance=0.000e+00" in out


def test_bad_circuit_line(capsys, caplog, tmp_path):
    path = tmp_path / "bad.qc"
    path.write_text("h 0\ncnot 0 1\nfrobnicate 1\n")
    code, _, _ = run(capsys, "run", "--circuit", str(path))
    assert code == 2 and "line 3" in caplog.text


def test_entangler_state_csv(capsys, tmp_path):
    out = tmp_path / "ghz.csv"
    code, _, _ = run(capsys, "run", "--builtin", "entangler", "--n", "3", "--init", "0", "--state-out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["index"]) for r in rows] == [0, 7]
    for r in rows:
        assert float(r["re"]) ** 2 + float(r["im"]) ** 2 == pytest.approx(0.5)


def test_circuit_file_runs(capsys, tmp_path):
    path = tmp_path / "bell.qc"
    path.write_text("# bell pair\nh 0\ncnot 0 1\n")
    dist = tmp_path / "d.csv"
    code, _, _ = run(capsys, "run", "--circuit", str(path), "--dist-out", str(dist))
    assert code == 0
    rows = [ln.split(",") for ln in dist.read_text().splitlines()[1:]]
    assert [int(o) for o, _ in rows] == [0, 3]
    assert all(abs(float(p) - 0.5) < 1e-15 for _, p in rows)


def test_deterministic_outputs(capsys, tmp_path):
    files = []
    for k in range(2):
        s, d = tmp_path / f"s{k}.csv", tmp_path / f"d{k}.csv"
        run(capsys, "run", "--builtin", "tfim", "--n", "5", "--init", "random", "--seed", "9",
            "--state-out", str(s), "--dist-out", str(d))
        files.append((s.read_bytes(), d.read_bytes()))
    assert files[0] == files[1]


def test_usage_errors(capsys):
    assert run(capsys, "run", "--builtin", "entangler", "--n", "3", "--mode", "compare")[0] == 2
    assert run(capsys, "run", "--builtin", "qft")[0] == 2
    assert run(capsys, "run", "--builtin", "qft", "--n", "3", "--init", "99")[0] == 2
    assert run(capsys, "run", "--builtin", "mul", "--m", "2", "--init", "63")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--mode", "sideways"])
    assert exc.value.code == 2


def test_resource_errors(capsys):
    assert run(capsys, "run", "--builtin", "qft", "--n", "30")[0] == 3
    assert run(capsys, "run", "--builtin", "div", "--m", "3", "--max-qubits", "12")[0] == 3
    assert run(capsys, "qpe", "--builtin", "tfim", "--n", "15", "--b", "2", "--strategy", "eigen")[0] == 3


def test_dump_circuit(capsys, tmp_path):
    out = tmp_path / "mul.qc"
    code, _, _ = run(capsys, "run", "--builtin", "mul", "--m", "2", "--dump-circuit", str(out))
    assert code == 0
    body = [ln for ln in out.read_text().splitlines() if ln and not ln.startswith("#")]
    assert len(body) == 24 and body[0].split()[0] in {"toffoli", "cnot", "x"}


def test_qpe_t_gate(capsys):
    code, out, _ = run(capsys, "qpe", "--builtin", "t-gate", "--b", "3", "--strategy", "simulate")
    d = json.loads(out)
    assert code == 0 and d["phi"] == 0.125 and d["strategy"] == "simulate"


def test_qpe_tfim_auto(capsys):
    code, out, _ = run(capsys, "qpe", "--builtin", "tfim", "--n", "4", "--b", "6", "--strategy", "auto",
                       "--eigenstate", "5")
    d = json.loads(out)
    assert code == 0 and d["strategy"] in {"simulate", "square", "eigen"}
    code, out, _ = run(capsys, "qpe", "--builtin", "tfim", "--n", "4", "--b", "6", "--strategy", "simulate",
                       "--eigenstate", "5")
    sim = json.loads(out)["phi"]
    assert min(abs(d["phi"] - sim), 1 - abs(d["phi"] - sim)) <= 2**-6


def test_qpe_tfim_reports_dense_construction(capsys):
    code, out, _ = run(capsys, "qpe", "--builtin", "tfim", "--n", "8", "--b", "4", "--strategy", "square")
    t = json.loads(out)["timings"]
    assert code == 0 and {"dense_construction_s", "apply_u_s", "squaring_s"} <= set(t)


def test_crossover_analytic(capsys):
    code, out, _ = run(capsys, "crossover", "--n-range", "8:14")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["n", "crossover_bits_squaring", "crossover_bits_eigen", "mode"]
    sq = [int(r["crossover_bits_squaring"]) for r in rows]
    eig = [int(r["crossover_bits_eigen"]) for r in rows]
    assert sq == sorted(sq) and eig == sorted(eig)
    code, out, _ = run(capsys, "crossover", "--n-range", "8:14", "--strassen")
    sq_s = [int(r["crossover_bits_squaring"]) for r in csv.DictReader(io.StringIO(out))]
    assert all(a < b for a, b in zip(sq_s, sq))


def test_crossover_measured(capsys):
    code, out, _ = run(capsys, "crossover", "--mode", "measured", "--n-range", "4:7", "--reps", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and all(r["mode"] == "measured" for r in rows)
    for col in ("crossover_bits_squaring", "crossover_bits_eigen"):
        assert all(r[col] != "" for r in rows)


def test_model_with_machine_file(capsys, tmp_path):
    cfg = tmp_path / "m.cfg"
    cfg.write_text("b_net = inf\n")
    code, out, _ = run(capsys, "model", "--n-range", "28", "--machine", str(cfg))
    n, fft, qft, ratio = out.splitlines()[1].split(",")
    assert code == 0 and float(ratio) == pytest.approx(11.2)


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "mul", "--sizes", "2,3", "--reps", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["suite", "size", "mode", "median_s", "speedup"]
    assert {(r["size"], r["mode"]) for r in rows} == {("2", "simulate"), ("2", "emulate"),
                                                      ("3", "simulate"), ("3", "emulate")}


def test_bench_skips_over_ceiling(capsys, caplog):
    code, out, _ = run(capsys, "bench", "div", "--sizes", "2:3", "--reps", "1", "--max-qubits", "14")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[-1]["mode"] == "skipped" and "skipped" in caplog.text


def test_parse_range():
    assert parse_range("4:7") == [4, 5, 6, 7]
    assert parse_range("3,9") == [3, 9]
