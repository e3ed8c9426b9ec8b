"""Timing harness: simulate vs. emulate for each workload, plus crossover tables."""

from __future__ import annotations

import csv
import logging
import statistics
import time
from typing import Callable, Iterable

import numpy as np

from . import arithmetic as ar
from .circuit import apply_circuit, build_qft, build_tfim_trotter, to_dense_matrix
from .costmodel import crossover_bits, crossover_from_timings
from .emulator import emulate_divide, emulate_multiply, emulate_qft
from .qpe import emulate_qpe_eigen, emulate_qpe_squaring, eigen_estimate, simulate_qpe
from .statevector import StateVector, allocate_amplitudes

log = logging.getLogger(__name__)

BENCH_FIELDS = ["suite", "size", "mode", "median_s", "speedup"]
CROSSOVER_FIELDS = ["n", "crossover_bits_squaring", "crossover_bits_eigen", "mode"]


def median_time(fn: Callable[[], object], reps: int = 5, warmup: int = 1) -> float:
    """Median wall time of ``fn`` over ``reps`` runs after ``warmup`` discarded runs."""
    if reps < 1:
        raise ValueError("need at least one repetition")
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def random_register_state(m: int, rng: np.random.Generator) -> StateVector:
    """Random superposition over (a, b) with the c register clear, compact layout."""
    amps = allocate_amplitudes(3 * m)
    k = 1 << (2 * m)
    amps[:k] = rng.normal(size=k) + 1j * rng.normal(size=k)
    amps /= np.linalg.norm(amps)
    return StateVector(3 * m, amps)


def qubits_needed(suite: str, size: int, b: int = 6) -> int:
    if suite in ("qft", "entangler", "tfim"):
        return size
    if suite in ("mul", "div"):
        return 3 * size + ar.ancilla_count(suite, size)
    if suite == "qpe":
        return size + b
    raise ValueError(f"unknown suite {suite!r}")


def _paths(suite: str, size: int, rng: np.random.Generator, b: int) -> dict[str, Callable[[], object]]:
    if suite == "qft":
        s = StateVector.random(size, rng)
        c = build_qft(size)
        return {"simulate": lambda: apply_circuit(s.copy(), c), "emulate": lambda: emulate_qft(s)}
    if suite in ("mul", "div"):
        layout = ar.RegisterLayout.for_op(suite, size)
        compact = ar.RegisterLayout.compact(size)
        s = random_register_state(size, rng)
        full = ar.embed(s, compact, layout)
        c = ar.BUILDERS[suite](layout)
        emu = emulate_multiply if suite == "mul" else emulate_divide
        return {"simulate": lambda: apply_circuit(full.copy(), c), "emulate": lambda: emu(s, compact)}
    if suite == "qpe":
        c = build_tfim_trotter(size)
        _, v = emulate_qpe_eigen(to_dense_matrix(c))[0]
        prep = StateVector(size, v.copy())
        return {
            "simulate": lambda: simulate_qpe(c, prep, b),
            "square": lambda: emulate_qpe_squaring(to_dense_matrix(c), v, b),
            "eigen": lambda: eigen_estimate(to_dense_matrix(c), v, b),
        }
    raise ValueError(f"unknown suite {suite!r}")


def run_suite(suite: str, sizes: Iterable[int], reps: int = 5, max_qubits: int = 26,
              seed: int = 0, b: int = 6) -> list[dict]:
    """One row per (size, path); speedup is simulate time over the row's time."""
    rows = []
    rng = np.random.default_rng(seed)
    for size in sizes:
        need = qubits_needed(suite, size, b)
        if need > max_qubits:
            log.warning("%s size %d needs %d qubits > ceiling %d; skipped", suite, size, need, max_qubits)
            rows.append({"suite": suite, "size": size, "mode": "skipped", "median_s": "", "speedup": ""})
            continue
        timings = {mode: median_time(fn, reps) for mode, fn in _paths(suite, size, rng, b).items()}
        for mode, t in timings.items():
            rows.append({"suite": suite, "size": size, "mode": mode, "median_s": t,
                         "speedup": timings["simulate"] / t})
    return rows


def speedups(rows: list[dict], mode: str = "emulate") -> dict[int, float]:
    return {r["size"]: r["speedup"] for r in rows if r["mode"] == mode}


def write_rows(rows: list[dict], fh, fieldnames: list[str]) -> None:
    w = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})


# --------------------------------------------------------------------------
# QPE step timings and crossovers


def qpe_step_timings(n: int, reps: int = 5, seed: int = 0) -> dict[str, float]:
    """Per-step times for the TFIM workload on ``n`` qubits.

    ``apply_u_s`` is one application of the Trotter circuit by the
    simulator; the rest are the dense-matrix steps of the emulation paths.
    """
    rng = np.random.default_rng(seed)
    c = build_tfim_trotter(n)
    s = StateVector.random(n, rng)
    u = to_dense_matrix(c).matrix
    return {
        "apply_u_s": median_time(lambda: apply_circuit(s, c), reps),
        "dense_construction_s": median_time(lambda: to_dense_matrix(c), reps),
        "matmul_s": median_time(lambda: u @ u, reps),
        "eigensolver_s": median_time(lambda: np.linalg.eig(u), max(1, reps // 2)),
    }


def analytic_crossover(ns: Iterable[int], coherent: bool = False, strassen: bool = False) -> list[dict]:
    rows = []
    for n in ns:
        G = len(build_tfim_trotter(n))
        rows.append({
            "n": n,
            "crossover_bits_squaring": crossover_bits(n, G, "square", coherent, strassen),
            "crossover_bits_eigen": crossover_bits(n, G, "eigen", coherent, strassen),
            "mode": "analytic",
        })
    return rows


def measured_crossover(ns: Iterable[int], reps: int = 5, b_max: int = 64) -> list[dict]:
    rows = []
    for n in ns:
        t = qpe_step_timings(n, reps)
        b_sq, b_eig = crossover_from_timings(t["apply_u_s"], t["dense_construction_s"],
                                             t["matmul_s"], t["eigensolver_s"], b_max)
        rows.append({"n": n, "crossover_bits_squaring": b_sq, "crossover_bits_eigen": b_eig,
                     "mode": "measured"})
    return rows
