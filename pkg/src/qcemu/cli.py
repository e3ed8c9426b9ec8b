"""Command-line front end.

Builtin workloads and their size flags:

  qft, entangler, tfim   --n  qubits
  mul, div               --m  bits per register (simulated path uses 3m
                              qubits plus work qubits; emulated path 3m)

Exit codes: 0 success, 1 comparison failure, 2 usage/parse error,
3 resource failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import arithmetic as ar
from . import bench
from . import gates as g
from .circuit import Circuit, apply_circuit, build_entangler, build_qft, build_tfim_trotter, dump_circuit, parse_circuit
from .costmodel import MachineParams, t_fft, t_qft
from .emulator import emulate_divide, emulate_multiply, emulate_qft, full_distribution
from .errors import AllocationError, QcemuError
from .qpe import (Strategy, dense_with_timing, eigen_estimate, emulate_qpe_eigen, emulate_qpe_squaring,
                  select_strategy, simulate_qpe)
from .statevector import StateVector, distance, new_basis_state, norm_sq, uniform_state, write_state_csv

log = logging.getLogger("qcemu")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
COMPARE_TOL = 1e-8
CIRCUIT_BUILTINS = ("qft", "entangler", "tfim")
ARITH_BUILTINS = ("mul", "div")


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"4:8"`` (inclusive) or ``"4,6,9"``."""
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use lo:hi or a,b,c") from None


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


# --------------------------------------------------------------------------
# run


def _initial_state(n: int, init: str, rng: np.random.Generator) -> StateVector:
    if init == "uniform":
        return uniform_state(n)
    if init == "random":
        return StateVector.random(n, rng)
    try:
        index = int(init)
    except ValueError:
        raise UsageError(f"--init must be a basis index, 'uniform' or 'random', got {init!r}") from None
    return new_basis_state(n, index)


def _register_state(m: int, init: str, rng: np.random.Generator) -> StateVector:
    """Compact a/b/c state with c clear."""
    if init == "random":
        return bench.random_register_state(m, rng)
    compact = ar.RegisterLayout.compact(m)
    if init == "uniform":
        s = new_basis_state(3 * m, 0)
        s.amps[:] = 0
        s.amps[: 1 << (2 * m)] = 2.0 ** -m
        return s
    s = _initial_state(3 * m, init, rng)
    if compact.decode(int(np.flatnonzero(s.amps)[0]))[2]:
        raise UsageError("arithmetic workloads need the c register clear in --init")
    return s


def _builtin_circuit(args) -> Circuit:
    if args.builtin == "qft":
        return build_qft(args.n)
    if args.builtin == "entangler":
        return build_entangler(args.n)
    if args.builtin == "tfim":
        return build_tfim_trotter(args.n, args.dt, args.field, args.coupling)
    layout = ar.RegisterLayout.for_op(args.builtin, args.m)
    return ar.BUILDERS[args.builtin](layout)


def cmd_run(args) -> int:
    rng = np.random.default_rng(args.seed)
    if (args.builtin is None) == (args.circuit is None):
        raise UsageError("give exactly one of --builtin or --circuit")
    arith = args.builtin in ARITH_BUILTINS
    if args.builtin in CIRCUIT_BUILTINS and args.n is None or arith and args.m is None:
        raise UsageError(f"--builtin {args.builtin} needs {'--m' if arith else '--n'}")

    if args.circuit is not None:
        with open(args.circuit) as fh:
            circuit = parse_circuit(fh.read(), args.n, label=args.circuit)
    else:
        circuit = _builtin_circuit(args)
    if args.dump_circuit:
        with _output(args.dump_circuit) as fh:
            fh.write(dump_circuit(circuit))
    if circuit.n > args.max_qubits and args.mode != "emulate":
        raise AllocationError(f"circuit needs {circuit.n} qubits, ceiling is --max-qubits {args.max_qubits}")
    if args.mode != "simulate" and args.builtin not in ("qft", *ARITH_BUILTINS):
        raise UsageError(f"no emulation path for {args.builtin or 'circuit files'}; use --mode simulate")

    if arith:
        layout = ar.RegisterLayout.for_op(args.builtin, args.m)
        compact = ar.RegisterLayout.compact(args.m)
        start = _register_state(args.m, args.init, rng)

        def simulate():
            out = apply_circuit(ar.embed(start, compact, layout), circuit)
            return ar.strip_work_qubits(out, layout, compact)

        emu = emulate_multiply if args.builtin == "mul" else emulate_divide

        def emulate():
            return emu(start, compact)
    else:
        start = _initial_state(circuit.n, args.init, rng)

        def simulate():
            return apply_circuit(start.copy(), circuit)

        def emulate():
            return emulate_qft(start)

    status = EXIT_OK
    if args.mode == "simulate":
        result = simulate()
    elif args.mode == "emulate":
        result = emulate()
    else:
        result = simulate()
        d = distance(result, emulate())
        print(f"distance={d:.3e}")
        if d > COMPARE_TOL:
            log.error("simulate and emulate disagree: distance %.3e > %.0e", d, COMPARE_TOL)
            status = EXIT_MISMATCH
    print(f"mode={args.mode} qubits={result.n} norm_sq={norm_sq(result):.15f}")
    if args.state_out:
        with _output(args.state_out) as fh:
            write_state_csv(result, fh)
    if args.dist_out:
        with _output(args.dist_out) as fh:
            fh.write(full_distribution(result).to_csv(cutoff=1e-28))
    return status


# --------------------------------------------------------------------------
# bench / qpe / crossover / model


def cmd_bench(args) -> int:
    rows = bench.run_suite(args.suite, args.sizes, args.reps, args.max_qubits, args.seed, args.b)
    with _output(args.csv) as fh:
        bench.write_rows(rows, fh, bench.BENCH_FIELDS)
    return EXIT_OK


def _qpe_workload(args):
    if args.builtin == "t-gate":
        return Circuit(1, [g.t(0)], "t"), Circuit(1, [g.x(0)])
    if args.builtin == "z-gate":
        return Circuit(1, [g.z(0)], "z"), Circuit(1, [g.x(0)])
    if args.n is None:
        raise UsageError("--builtin tfim needs --n")
    return build_tfim_trotter(args.n, args.dt, args.field, args.coupling), None


def cmd_qpe(args) -> int:
    u, prep = _qpe_workload(args)
    if u.n + args.b > args.max_qubits and args.strategy == "simulate":
        raise AllocationError(f"simulation needs {u.n + args.b} qubits > --max-qubits {args.max_qubits}")
    timings = {}
    dense, timings["dense_construction_s"] = dense_with_timing(u)
    if prep is None:
        pairs = emulate_qpe_eigen(dense)
        _, v = pairs[args.eigenstate % len(pairs)]
        prep_state = StateVector(u.n, v.copy())
    else:
        prep_state = apply_circuit(new_basis_state(u.n, 0), prep)
        v = prep_state.amps
    timings["apply_u_s"] = bench.median_time(lambda: apply_circuit(prep_state.copy(), u), reps=3)

    strategy = Strategy(args.strategy) if args.strategy != "auto" else select_strategy(
        u.n, args.b, len(u), coherent=True)
    if strategy is Strategy.SIMULATE:
        est = simulate_qpe(u, prep_state, args.b)
    elif strategy is Strategy.SQUARE:
        est = emulate_qpe_squaring(dense, v, args.b)
    else:
        est = eigen_estimate(dense, v, args.b)
    est.timings = {**timings, **est.timings}
    out = est.to_json()
    out["strategy"] = strategy.value
    with _output(args.json) as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_crossover(args) -> int:
    if args.mode == "analytic":
        rows = bench.analytic_crossover(args.n_range, args.coherent, args.strassen)
    else:
        need = max(args.n_range)
        if 2 * need > args.max_qubits:
            raise AllocationError(f"dense matrices for n={need} exceed --max-qubits {args.max_qubits}")
        rows = bench.measured_crossover(args.n_range, args.reps, args.b_max)
    with _output(args.csv) as fh:
        bench.write_rows(rows, fh, bench.CROSSOVER_FIELDS)
    return EXIT_OK


def cmd_model(args) -> int:
    machine = MachineParams.load(args.machine) if args.machine else MachineParams()
    with _output(args.csv) as fh:
        fh.write("n,t_fft_s,t_qft_s,ratio\n")
        for n in args.n_range:
            a, b = t_fft(n, machine), t_qft(n, machine)
            fh.write(f"{n},{a:.6g},{b:.6g},{b / a:.6g}\n")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcemu", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def tfim_flags(sp):
        sp.add_argument("--dt", type=float, default=0.1, help="TFIM Trotter step")
        sp.add_argument("--field", type=float, default=1.0, help="TFIM transverse field h")
        sp.add_argument("--coupling", type=float, default=1.0, help="TFIM coupling J")

    run = sub.add_parser("run", help="execute a circuit or builtin workload")
    run.add_argument("--builtin", choices=CIRCUIT_BUILTINS + ARITH_BUILTINS)
    run.add_argument("--circuit", help="circuit text file")
    run.add_argument("--n", type=int, help="qubits (qft, entangler, tfim, circuit files)")
    run.add_argument("--m", type=int, help="bits per register (mul, div)")
    run.add_argument("--mode", choices=("simulate", "emulate", "compare"), default="simulate")
    run.add_argument("--init", default="0", help="basis index, 'uniform' or 'random'")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--state-out", help="state CSV path ('-' for stdout)")
    run.add_argument("--dist-out", help="distribution CSV path ('-' for stdout)")
    run.add_argument("--dump-circuit", metavar="PATH", help="write the circuit text ('-' for stdout)")
    run.add_argument("--max-qubits", type=int, default=26)
    tfim_flags(run)
    run.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="time simulate vs emulate; CSV out")
    b.add_argument("suite", choices=("qft", "mul", "div", "qpe"))
    b.add_argument("--sizes", type=parse_range, required=True, help="lo:hi or comma list")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--b", type=int, default=6, help="precision bits for the qpe suite")
    b.add_argument("--csv", default="-")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-qubits", type=int, default=26)
    b.set_defaults(func=cmd_bench)

    q = sub.add_parser("qpe", help="phase estimation with a chosen or automatic strategy")
    q.add_argument("--builtin", choices=("t-gate", "z-gate", "tfim"), required=True)
    q.add_argument("--n", type=int)
    q.add_argument("--b", type=int, default=6)
    q.add_argument("--strategy", choices=("simulate", "square", "eigen", "auto"), default="auto")
    q.add_argument("--eigenstate", type=int, default=0, help="which TFIM eigenvector to prepare")
    q.add_argument("--json", default="-")
    q.add_argument("--max-qubits", type=int, default=26)
    tfim_flags(q)
    q.set_defaults(func=cmd_qpe)

    c = sub.add_parser("crossover", help="QPE crossover precision table")
    c.add_argument("--n-range", type=parse_range, default=parse_range("8:14"))
    c.add_argument("--mode", choices=("analytic", "measured"), default="analytic")
    c.add_argument("--strassen", action="store_true")
    c.add_argument("--coherent", action="store_true")
    c.add_argument("--b-max", type=int, default=64)
    c.add_argument("--reps", type=int, default=5)
    c.add_argument("--csv", default="-")
    c.add_argument("--max-qubits", type=int, default=26)
    c.set_defaults(func=cmd_crossover)

    mdl = sub.add_parser("model", help="FFT vs QFT runtime model")
    mdl.add_argument("--n-range", type=parse_range, default=parse_range("20:32"))
    mdl.add_argument("--machine", help="key = value machine-params file")
    mdl.add_argument("--csv", default="-")
    mdl.set_defaults(func=cmd_model)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (AllocationError, MemoryError) as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except (UsageError, QcemuError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
