"""Wave-function container, comparison, and measurement.

Bit convention: qubit ``k`` is bit ``k`` of the amplitude index, bit 0 being
the least significant.  A two-qubit index ``i = 2*q1 + q0``.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllocationError,
    DimensionError,
    NormalizationError,
    QubitIndexError,
    ZeroProbabilityError,
)

DTYPE = np.complex128
CSV_AMP_CUTOFF = 1e-14


def _physical_memory() -> int | None:
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError, AttributeError):
        return None


def allocate_amplitudes(n: int, extra_shape: tuple[int, ...] = ()) -> np.ndarray:
    """Zeroed complex array of shape ``(2**n, *extra_shape)``.

    Raises AllocationError instead of letting the OS overcommit and crash later.
    """
    if n < 1:
        raise DimensionError(f"qubit count must be >= 1, got {n}")
    n_items = (1 << n) * int(np.prod(extra_shape, dtype=np.int64))
    nbytes = n_items * np.dtype(DTYPE).itemsize
    mem = _physical_memory()
    if mem is not None and nbytes > mem:
        raise AllocationError(
            f"{n} qubits need {nbytes / 2**30:.1f} GiB, machine has {mem / 2**30:.1f} GiB"
        )
    try:
        return np.zeros((1 << n,) + tuple(extra_shape), dtype=DTYPE)
    except (MemoryError, ValueError) as exc:
        raise AllocationError(f"cannot allocate state for {n} qubits: {exc}") from exc


@dataclass(eq=False)
class StateVector:
    """Dense pure state of ``n`` qubits.

    ``amps`` is always a C-contiguous complex128 array of length ``2**n``;
    kernels in :mod:`qcemu.gates` mutate it in place.
    """

    n: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=DTYPE)
        if self.n < 1:
            raise DimensionError(f"qubit count must be >= 1, got {self.n}")
        if self.amps.shape != (1 << self.n,):
            raise DimensionError(
                f"expected {1 << self.n} amplitudes for {self.n} qubits, got shape {self.amps.shape}"
            )

    @classmethod
    def from_array(cls, amps) -> "StateVector":
        amps = np.asarray(amps, dtype=DTYPE)
        size = amps.shape[0] if amps.ndim == 1 else -1
        if size < 2 or size & (size - 1):
            raise DimensionError(f"amplitude count must be a power of two >= 2, got {amps.shape}")
        return cls(size.bit_length() - 1, amps.copy())

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StateVector":
        """Haar-like random state (normalized complex Gaussian)."""
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def __repr__(self):
        return f"StateVector(n={self.n}, nnz={np.count_nonzero(self.amps)})"


@dataclass(frozen=True)
class MeasurementOutcome:
    bits: int
    probability: float


def new_basis_state(n: int, i: int = 0) -> StateVector:
    if n < 1:
        raise DimensionError(f"qubit count must be >= 1, got {n}")
    if not 0 <= i < (1 << n):
        raise QubitIndexError(f"basis index {i} out of range for {n} qubits")
    amps = allocate_amplitudes(n)
    amps[i] = 1.0
    return StateVector(n, amps)


def uniform_state(n: int) -> StateVector:
    amps = allocate_amplitudes(n)
    amps[:] = (1 << n) ** -0.5
    return StateVector(n, amps)


def norm_sq(state: StateVector) -> float:
    return float(np.vdot(state.amps, state.amps).real)


def distance(a: StateVector, b: StateVector) -> float:
    """Max-abs amplitude difference after removing the best global phase.

    ``b`` is rotated by the unit phase maximizing ``Re<a, b>``; when the
    overlap (or ``b`` itself) is numerically zero no rotation is applied.
    """
    if a.n != b.n:
        raise DimensionError(f"cannot compare {a.n}-qubit and {b.n}-qubit states")
    overlap = np.vdot(b.amps, a.amps)
    mag = abs(overlap)
    if mag > 1e-300 and norm_sq(b) > 1e-300:
        aligned = b.amps * (overlap / mag)
    else:
        aligned = b.amps
    return float(np.max(np.abs(a.amps - aligned)))


def _checked_probabilities(state: StateVector, tol: float = 1e-6) -> np.ndarray:
    p = state.probabilities()
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise NormalizationError(f"state norm^2 is {total:.12g}, expected 1 within {tol}")
    return p / total


def sample(state: StateVector, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Draw ``shots`` full-register measurement outcomes without collapsing."""
    p = _checked_probabilities(state)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(draws, state.dim - 1)


def sample_all(state: StateVector, rng: np.random.Generator) -> MeasurementOutcome:
    i = int(sample(state, rng, 1)[0])
    return MeasurementOutcome(i, float(abs(state.amps[i]) ** 2))


def _qubit_mask(n: int, qubits: Sequence[int]) -> int:
    mask = 0
    for q in qubits:
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit {q} out of range for {n} qubits")
        if mask >> q & 1:
            raise QubitIndexError(f"qubit {q} listed twice")
        mask |= 1 << q
    return mask


def scatter_bits(value: int, qubits: Sequence[int]) -> int:
    """Place bit ``j`` of ``value`` at index bit ``qubits[j]``."""
    out = 0
    for j, q in enumerate(qubits):
        out |= ((value >> j) & 1) << q
    return out


def gather_bits(index, qubits: Sequence[int]):
    """Inverse of :func:`scatter_bits`; works elementwise on integer arrays."""
    out = index * 0
    for j, q in enumerate(qubits):
        out = out | (((index >> q) & 1) << j)
    return out


def collapse(state: StateVector, qubits: Sequence[int], outcome: int) -> StateVector:
    """Project onto ``outcome`` (bit ``j`` for ``qubits[j]``) and renormalize in place."""
    mask = _qubit_mask(state.n, qubits)
    if outcome < 0 or outcome >> len(qubits):
        raise QubitIndexError(f"outcome {outcome} does not fit in {len(qubits)} bits")
    want = scatter_bits(outcome, qubits)
    idx = np.arange(state.dim)
    keep = (idx & mask) == want
    p = float(np.sum(np.abs(state.amps[keep]) ** 2))
    if p <= 1e-12:
        raise ZeroProbabilityError(f"outcome {outcome} on qubits {list(qubits)} has probability {p:.3e}")
    state.amps[~keep] = 0.0
    state.amps /= np.sqrt(p)
    return state


def write_state_csv(state: StateVector, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i in np.flatnonzero(np.abs(state.amps) > CSV_AMP_CUTOFF):
        a = state.amps[i]
        w.writerow([int(i), repr(float(a.real)), repr(float(a.imag))])


def state_to_csv(state: StateVector) -> str:
    buf = io.StringIO()
    write_state_csv(state, buf)
    return buf.getvalue()


def read_state_csv(lines: Iterable[str], n: int) -> StateVector:
    reader = csv.reader(lines)
    header = next(reader)
    if [h.strip() for h in header] != ["index", "re", "im"]:
        raise ValueError(f"bad state CSV header: {header}")
    amps = allocate_amplitudes(n)
    for row in reader:
        if row:
            amps[int(row[0])] = complex(float(row[1]), float(row[2]))
    return StateVector(n, amps)
