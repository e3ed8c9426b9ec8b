"""Classical shortcuts that reproduce whole quantum subroutines.

Every function here returns a new state and leaves its input untouched.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .arithmetic import RegisterLayout
from .errors import DimensionError, NonInjectiveError, QubitIndexError, RegisterNotClearError
from .fft import fft_radix2
from .statevector import StateVector, allocate_amplitudes, scatter_bits

SUPPORT_TOL = 1e-12


@dataclass
class DistributionTable:
    """Outcome probabilities over ``qubits``; outcome bit ``j`` is ``qubits[j]``."""

    probs: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self):
        self.qubits = tuple(self.qubits)
        if self.probs.shape != (1 << len(self.qubits),):
            raise DimensionError("probability table size does not match qubit count")

    def modal(self) -> int:
        return int(np.argmax(self.probs))

    def items(self, cutoff: float = 0.0):
        for o in np.flatnonzero(self.probs > cutoff):
            yield int(o), float(self.probs[o])

    def to_csv(self, cutoff: float = 0.0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["outcome", "probability"])
        for o, p in self.items(cutoff):
            w.writerow([o, f"{p:.17g}"])
        return buf.getvalue()


# --------------------------------------------------------------------------
# qubit-subset reshaping


def _check_subset(n: int, qubits: Sequence[int]) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"duplicate qubit indices {list(qubits)}")
    for q in qubits:
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit {q} out of range for {n} qubits")
    return qubits


def _subset_perm(n: int, qubits: tuple[int, ...]) -> list[int]:
    """Tensor axis order putting ``qubits`` last with ``qubits[0]`` innermost."""
    chosen = set(qubits)
    others = [n - 1 - q for q in range(n - 1, -1, -1) if q not in chosen]
    return others + [n - 1 - q for q in reversed(qubits)]


def _as_cosets(amps: np.ndarray, n: int, qubits: tuple[int, ...]):
    """``(matrix, perm)``: rows are cosets of untouched qubits, columns the subset index."""
    k = len(qubits)
    if qubits == tuple(range(k)):
        return amps.reshape(1 << (n - k), 1 << k), None
    perm = _subset_perm(n, qubits)
    mat = np.ascontiguousarray(amps.reshape((2,) * n).transpose(perm)).reshape(1 << (n - k), 1 << k)
    return mat, perm


def _from_cosets(mat: np.ndarray, n: int, perm) -> np.ndarray:
    if perm is None:
        return mat.reshape(-1)
    inv = np.argsort(perm)
    return np.ascontiguousarray(mat.reshape((2,) * n).transpose(inv)).reshape(-1)


# --------------------------------------------------------------------------
# QFT


def emulate_qft(state: StateVector, qubits: Sequence[int] | None = None, inverse: bool = False,
                backend: str = "numpy") -> StateVector:
    """Fourier transform on the amplitudes indexed by ``qubits`` (all by default).

    Sign convention matches the gate-level QFT: ``|x> -> sum_y exp(+2 pi i x y / N) |y> / sqrt(N)``.
    ``backend="radix2"`` uses the in-house iterative kernel instead of ``numpy.fft``.
    """
    qubits = tuple(range(state.n)) if qubits is None else _check_subset(state.n, qubits)
    if not qubits:
        return state.copy()
    mat, perm = _as_cosets(state.amps.copy(), state.n, qubits)
    if backend == "radix2":
        fft_radix2(mat, inverse=inverse)
    elif backend == "numpy":
        mat = (np.fft.fft if inverse else np.fft.ifft)(mat, axis=1, norm="ortho")
    else:
        raise ValueError(f"unknown FFT backend {backend!r}")
    return StateVector(state.n, _from_cosets(np.ascontiguousarray(mat), state.n, perm))


# --------------------------------------------------------------------------
# permutations


def _check_support(state: StateVector, layout: RegisterLayout) -> np.ndarray:
    """Indices with the c register clear; raises if amplitude lives elsewhere."""
    idx = np.arange(state.dim)
    c_mask = _register_mask(layout.c_qubits)
    clear = (idx & c_mask) == 0
    outside = np.where(clear, 0.0, np.abs(state.amps))
    worst = int(np.argmax(outside))
    if outside[worst] > SUPPORT_TOL:
        raise RegisterNotClearError(worst, state.amps[worst])
    return idx[clear]


def emulate_classical_function(state: StateVector, layout: RegisterLayout | None,
                               f: Callable[[np.ndarray], np.ndarray]) -> StateVector:
    """Move amplitude at basis index ``i`` to ``f(i)``.

    ``f`` is vectorized: it receives an int64 index array.  With a layout,
    only indices whose c register is clear are moved (and the rest must be
    empty); without one, ``f`` must permute the whole index range.
    """
    if layout is not None and layout.n > state.n:
        raise DimensionError(f"layout needs {layout.n} qubits, state has {state.n}")
    src = _check_support(state, layout) if layout is not None else np.arange(state.dim)
    dst = np.asarray(f(src), dtype=np.int64)
    if dst.shape != src.shape:
        raise DimensionError("classical function changed the number of indices")
    if dst.size and (dst.min() < 0 or dst.max() >= state.dim):
        raise QubitIndexError("classical function maps outside the state space")
    hits = np.bincount(dst, minlength=state.dim)
    if hits.max(initial=0) > 1:
        clash = int(np.argmax(hits))
        raise NonInjectiveError(f"{hits[clash]} source indices map to basis index {clash}")
    out = allocate_amplitudes(state.n)
    out[dst] = state.amps[src]
    return StateVector(state.n, out)


def _register_mask(qubits: Sequence[int]) -> int:
    return sum(1 << q for q in qubits)


def multiply_map(layout: RegisterLayout) -> Callable[[np.ndarray], np.ndarray]:
    mod = (1 << layout.m) - 1

    def f(idx):
        a, b, _ = layout.decode(idx)
        return idx | scatter_bits((a * b) & mod, layout.c_qubits)

    return f


def divide_map(layout: RegisterLayout) -> Callable[[np.ndarray], np.ndarray]:
    a_mask = _register_mask(layout.a_qubits)

    def f(idx):
        a, b, _ = layout.decode(idx)
        safe_b = np.where(b == 0, 1, b)
        r = np.where(b == 0, a, a % safe_b)
        q = np.where(b == 0, 0, a // safe_b)
        return (idx & ~a_mask) | scatter_bits(r, layout.a_qubits) | scatter_bits(q, layout.c_qubits)

    return f


def emulate_multiply(state: StateVector, layout: RegisterLayout) -> StateVector:
    """(a, b, 0) -> (a, b, a*b mod 2**m) as a direct amplitude permutation."""
    return emulate_classical_function(state, layout, multiply_map(layout))


def emulate_divide(state: StateVector, layout: RegisterLayout) -> StateVector:
    """(a, b, 0) -> (a mod b, b, a // b); b == 0 entries stay put."""
    return emulate_classical_function(state, layout, divide_map(layout))


# --------------------------------------------------------------------------
# measurement statistics


def full_distribution(state: StateVector, qubits: Sequence[int] | None = None) -> DistributionTable:
    qubits = tuple(range(state.n)) if qubits is None else _check_subset(state.n, qubits)
    p = np.abs(state.amps) ** 2
    if not qubits:
        return DistributionTable(np.array([p.sum()]), ())
    mat, _ = _as_cosets(p, state.n, qubits)
    return DistributionTable(mat.sum(axis=0), qubits)


def expectation(state: StateVector, observable, qubits: Sequence[int] | None = None) -> float:
    """Exact expectation of a diagonal observable over ``qubits``.

    ``observable`` may be an array of 2**k values, a mapping outcome -> value,
    or a vectorized callable on outcome arrays.
    """
    dist = full_distribution(state, qubits)
    outcomes = np.arange(dist.probs.size)
    if callable(observable):
        values = np.broadcast_to(np.asarray(observable(outcomes), dtype=float), outcomes.shape)
    elif isinstance(observable, Mapping):
        values = np.array([float(observable[int(o)]) for o in outcomes])
    else:
        values = np.asarray(observable, dtype=float)
        if values.shape != outcomes.shape:
            raise DimensionError(f"observable needs {outcomes.size} values, got {values.shape}")
    return float(np.dot(dist.probs, values))


def parity_observable(outcomes: np.ndarray) -> np.ndarray:
    """Z x Z x ... x Z eigenvalue of each outcome."""
    bits = np.zeros_like(outcomes)
    o = outcomes.copy()
    while np.any(o):
        bits ^= o & 1
        o >>= 1
    return 1 - 2 * bits
