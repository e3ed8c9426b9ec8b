"""Gate library and in-place state-vector kernels.

Kernels reshape the amplitude array into an ``n``-axis tensor (qubit ``q``
lives on axis ``n - 1 - q``) and operate on basic-indexing views, so a gate
with ``k`` controls reads and writes only the ``2**(n-k)`` amplitudes it can
change.  Any trailing axes after the first are treated as a batch: applying
a circuit to an identity matrix therefore yields the circuit's dense unitary.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import QubitIndexError
from .statevector import StateVector

SINGLE_QUBIT_KINDS = frozenset({"X", "Y", "Z", "H", "S", "T", "RZ", "RX", "CUSTOM"})
MIN_CONTROLS = {"CNOT": 1, "CR": 1, "TOFFOLI": 2}
PARAMETRIC = frozenset({"RZ", "RX", "CR"})
ALL_KINDS = SINGLE_QUBIT_KINDS | set(MIN_CONTROLS) | {"SWAP"}

_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}
_FIXED["CNOT"] = _FIXED["TOFFOLI"] = _FIXED["X"]


@dataclass(frozen=True)
class Gate:
    """A gate instance: ``kind`` acting on ``targets`` when all ``controls`` are 1.

    Only SWAP has two targets.  CNOT/CR/TOFFOLI carry their canonical control
    qubits in ``controls``; :meth:`controlled` may append more.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    theta: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if kind not in ALL_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != (2 if kind == "SWAP" else 1):
            raise ValueError(f"{kind} takes {'2 targets' if kind == 'SWAP' else '1 target'}")
        if len(self.controls) < MIN_CONTROLS.get(kind, 0):
            raise ValueError(f"{kind} needs at least {MIN_CONTROLS[kind]} control(s)")
        qubits = self.qubits
        if min(qubits) < 0:
            raise QubitIndexError(f"negative qubit index in {self}")
        if len(set(qubits)) != len(qubits):
            raise QubitIndexError(f"target/control indices overlap in {kind} {qubits}")
        if kind in PARAMETRIC and self.theta is None:
            raise ValueError(f"{kind} requires an angle")
        if kind == "CUSTOM":
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2):
                raise ValueError("CUSTOM gate needs a 2x2 matrix")
            if np.max(np.abs(m.conj().T @ m - np.eye(2))) > 1e-12:
                raise ValueError("CUSTOM matrix is not unitary")
            object.__setattr__(self, "matrix", m)

    @property
    def target(self) -> int:
        return self.targets[0]

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def controlled(self, *extra: int) -> "Gate":
        return Gate(self.kind, self.targets, self.controls + tuple(extra), self.theta, self.matrix)

    def remapped(self, mapping: Sequence[int]) -> "Gate":
        return Gate(
            self.kind,
            tuple(mapping[q] for q in self.targets),
            tuple(mapping[q] for q in self.controls),
            self.theta,
            self.matrix,
        )

    def adjoint(self) -> "Gate":
        if self.kind in ("RZ", "RX", "CR"):
            return Gate(self.kind, self.targets, self.controls, -self.theta)
        if self.kind in ("S", "T", "CUSTOM"):
            return Gate("CUSTOM", self.targets, self.controls, matrix=base_matrix(self).conj().T)
        return self


def h(q): return Gate("H", (q,))
def x(q): return Gate("X", (q,))
def y(q): return Gate("Y", (q,))
def z(q): return Gate("Z", (q,))
def s(q): return Gate("S", (q,))
def t(q): return Gate("T", (q,))
def rz(theta, q): return Gate("RZ", (q,), theta=float(theta))
def rx(theta, q): return Gate("RX", (q,), theta=float(theta))
def cnot(c, tgt): return Gate("CNOT", (tgt,), (c,))
def cr(theta, c, tgt): return Gate("CR", (tgt,), (c,), float(theta))
def toffoli(c1, c2, tgt): return Gate("TOFFOLI", (tgt,), (c1, c2))
def swap(q1, q2): return Gate("SWAP", (q1, q2))
def custom(matrix, q): return Gate("CUSTOM", (q,), matrix=np.asarray(matrix, dtype=complex))


def base_matrix(gate: Gate) -> np.ndarray:
    """The 2x2 operator applied to the target when every control is set."""
    kind = gate.kind
    if kind in _FIXED:
        return _FIXED[kind].copy()
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * gate.theta), np.exp(0.5j * gate.theta)])
    if kind == "RX":
        c, sn = math.cos(gate.theta / 2), math.sin(gate.theta / 2)
        return np.array([[c, -1j * sn], [-1j * sn, c]])
    if kind == "CR":
        return np.diag([1.0, np.exp(1j * gate.theta)]).astype(complex)
    if kind == "CUSTOM":
        return gate.matrix.copy()
    raise ValueError(f"{kind} has no single-target matrix")


def matrix_of(gate: Gate) -> np.ndarray:
    """Dense matrix of ``gate`` on its own qubits.

    Basis ordering follows the usual textbook layout: the first listed qubit
    (first control, or first SWAP target) is the most significant bit, so
    CNOT comes out as ``[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]``.
    """
    if gate.kind == "SWAP":
        core = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    else:
        core = base_matrix(gate)
    k = len(gate.controls)
    if k == 0:
        return core
    dim = core.shape[0] << k
    out = np.eye(dim, dtype=complex)
    out[-core.shape[0]:, -core.shape[0]:] = core
    return out


# --------------------------------------------------------------------------
# instrumentation


class TouchCounter:
    def __init__(self):
        self.count = 0


_counters: list[TouchCounter] = []


@contextlib.contextmanager
def count_touched():
    """Count amplitudes read/written by kernels inside the block."""
    c = TouchCounter()
    _counters.append(c)
    try:
        yield c
    finally:
        _counters.remove(c)


def _record(k: int) -> None:
    for c in _counters:
        c.count += k


# --------------------------------------------------------------------------
# raw kernels on (2**n, *batch) arrays


def _check_qubits(n: int, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"qubit indices overlap: {list(qubits)}")


def _view(t: np.ndarray, n: int, fixed: dict[int, int]) -> np.ndarray:
    idx = [slice(None)] * t.ndim
    for q, bit in fixed.items():
        idx[n - 1 - q] = slice(bit, bit + 1)
    return t[tuple(idx)]


def _tensor(amps: np.ndarray, n: int) -> np.ndarray:
    if not amps.flags.c_contiguous:
        raise ValueError("amplitude array must be C-contiguous")
    return amps.reshape((2,) * n + amps.shape[1:])


def apply_matrix_raw(amps, n, u, target, controls=()):
    t = _tensor(amps, n)
    sel = {c: 1 for c in controls}
    v0 = _view(t, n, {**sel, target: 0})
    v1 = _view(t, n, {**sel, target: 1})
    batch = int(np.prod(amps.shape[1:], dtype=np.int64))
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    if u01 == 0 and u10 == 0:
        if u00 != 1:
            v0 *= u00
            _record(v0.size // batch)
        if u11 != 1:
            v1 *= u11
            _record(v1.size // batch)
        return amps
    _record(2 * v0.size // batch)
    if u00 == 0 and u11 == 0 and u01 == 1 and u10 == 1:
        tmp = v0.copy()
        v0[...] = v1
        v1[...] = tmp
        return amps
    a0 = v0.copy()
    v0 *= u00
    v0 += u01 * v1
    v1 *= u11
    v1 += u10 * a0
    return amps


def apply_phase_raw(amps, n, theta, qubits):
    """Multiply by ``exp(i*theta)`` every amplitude whose ``qubits`` bits are all 1."""
    t = _tensor(amps, n)
    v = _view(t, n, {q: 1 for q in qubits})
    v *= np.exp(1j * theta)
    _record(v.size // int(np.prod(amps.shape[1:], dtype=np.int64)))
    return amps


def apply_swap_raw(amps, n, q1, q2, controls=()):
    t = _tensor(amps, n)
    sel = {c: 1 for c in controls}
    v01 = _view(t, n, {**sel, q1: 0, q2: 1})
    v10 = _view(t, n, {**sel, q1: 1, q2: 0})
    _record(2 * v01.size // int(np.prod(amps.shape[1:], dtype=np.int64)))
    tmp = v01.copy()
    v01[...] = v10
    v10[...] = tmp
    return amps


_PHASE_ANGLE = {"Z": math.pi, "S": math.pi / 2, "T": math.pi / 4}


def apply_gate_raw(amps: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    _check_qubits(n, gate.qubits)
    kind = gate.kind
    if kind == "SWAP":
        return apply_swap_raw(amps, n, gate.targets[0], gate.targets[1], gate.controls)
    if kind == "CR":
        return apply_phase_raw(amps, n, gate.theta, gate.qubits)
    if kind in _PHASE_ANGLE:
        return apply_phase_raw(amps, n, _PHASE_ANGLE[kind], gate.qubits)
    return apply_matrix_raw(amps, n, base_matrix(gate), gate.target, gate.controls)


# --------------------------------------------------------------------------
# StateVector-level API (in place; the state is also returned)


def apply_single_qubit(state: StateVector, u, target: int) -> StateVector:
    _check_qubits(state.n, [target])
    apply_matrix_raw(state.amps, state.n, np.asarray(u, dtype=complex), target)
    return state


def apply_controlled(state: StateVector, u, target: int, controls: Sequence[int]) -> StateVector:
    _check_qubits(state.n, [target, *controls])
    apply_matrix_raw(state.amps, state.n, np.asarray(u, dtype=complex), target, tuple(controls))
    return state


def apply_controlled_phase(state: StateVector, theta: float, q1: int, q2: int) -> StateVector:
    """Diagonal fast path: touches only the quarter of amplitudes with both bits set."""
    _check_qubits(state.n, [q1, q2])
    apply_phase_raw(state.amps, state.n, theta, (q1, q2))
    return state


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    apply_gate_raw(state.amps, state.n, gate)
    return state
