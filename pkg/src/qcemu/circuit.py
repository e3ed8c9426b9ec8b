"""Circuit IR, workload builders, execution, and dense export."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gates as g
from .errors import CircuitParseError, DenseLimitError, DimensionError, QubitIndexError
from .gates import Gate
from .statevector import StateVector, allocate_amplitudes

DENSE_LIMIT = 14


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"circuit needs at least one qubit, got {self.n}")
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.n:
            raise QubitIndexError(f"{gate.kind} on qubits {gate.qubits} exceeds {self.n}-qubit circuit")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for gate in gates:
            self.append(gate)
        return self

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def gate_count(self, kind: str | None = None) -> int:
        if kind is None:
            return len(self.gates)
        return sum(1 for gate in self.gates if gate.kind == kind.upper())

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [gate.adjoint() for gate in reversed(self.gates)], f"{self.label}^-1")

    def remapped(self, mapping: Sequence[int], n: int) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]`` inside an ``n``-qubit circuit."""
        return Circuit(n, [gate.remapped(mapping) for gate in self.gates], self.label)

    def controlled(self, *controls: int) -> "Circuit":
        return Circuit(self.n, [gate.controlled(*controls) for gate in self.gates], self.label)

    def to_text(self) -> str:
        return dump_circuit(self)


# --------------------------------------------------------------------------
# builders


def build_qft(n: int) -> Circuit:
    """QFT with the +2*pi*i sign, terminated by the bit-reversal SWAP network.

    Qubit ``j`` (from the top) gets H followed by CR(pi/2**k) from each lower
    qubit ``j - k``; the final swaps put output bit ``l`` back on qubit ``l``.
    """
    if n < 1:
        raise DimensionError("QFT needs n >= 1")
    c = Circuit(n, label=f"qft{n}")
    for j in range(n - 1, -1, -1):
        c.append(g.h(j))
        for ctrl in range(j - 1, -1, -1):
            c.append(g.cr(math.pi / 2 ** (j - ctrl), ctrl, j))
    for q in range(n // 2):
        c.append(g.swap(q, n - 1 - q))
    return c


def build_entangler(n: int) -> Circuit:
    if n < 2:
        raise DimensionError("entangler needs n >= 2")
    c = Circuit(n, [g.h(0)], label=f"entangler{n}")
    c.extend(g.cnot(0, j) for j in range(1, n))
    return c


def build_tfim_trotter(n: int, dt: float = 0.1, h: float = 1.0, J: float = 1.0) -> Circuit:
    """One first-order Trotter step of the open transverse-field Ising chain.

    Field layer Rx(2*h*dt) on every site, then exp(-i*J*dt*Z_i Z_{i+1}) as
    CNOT, Rz(2*J*dt), CNOT for each bond: 4n - 3 gates.
    """
    if n < 2:
        raise DimensionError("TFIM chain needs n >= 2")
    c = Circuit(n, label=f"tfim{n}")
    c.extend(g.rx(2 * h * dt, q) for q in range(n))
    for q in range(n - 1):
        c.extend([g.cnot(q, q + 1), g.rz(2 * J * dt, q + 1), g.cnot(q, q + 1)])
    return c


# --------------------------------------------------------------------------
# execution


def apply_circuit(state: StateVector, c: Circuit) -> StateVector:
    """Apply ``c`` gate by gate, in place."""
    if state.n != c.n:
        raise DimensionError(f"{state.n}-qubit state vs {c.n}-qubit circuit")
    for gate in c.gates:
        g.apply_gate_raw(state.amps, state.n, gate)
    return state


@dataclass(eq=False)
class DenseUnitary:
    """A ``2**n x 2**n`` operator held as a dense complex matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = self.matrix.shape[0]
        if self.matrix.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
            raise DimensionError(f"dense unitary must be square with power-of-two size, got {self.matrix.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))


def to_dense_matrix(c: Circuit, dense_limit: int = DENSE_LIMIT) -> DenseUnitary:
    """Column ``i`` is the circuit applied to basis state ``i``; cost O(G * 4**n)."""
    if c.n > dense_limit:
        raise DenseLimitError(f"{c.n} qubits exceeds dense limit {dense_limit}")
    m = allocate_amplitudes(c.n, (1 << c.n,))
    np.fill_diagonal(m, 1.0)
    for gate in c.gates:
        g.apply_gate_raw(m, c.n, gate)
    return DenseUnitary(m)


# --------------------------------------------------------------------------
# text format

# name -> (angle count, qubit count, gate factory taking (*angles, *qubits))
_TEXT_GATES = {
    "h": (0, 1, g.h),
    "x": (0, 1, g.x),
    "y": (0, 1, g.y),
    "z": (0, 1, g.z),
    "s": (0, 1, g.s),
    "t": (0, 1, g.t),
    "rz": (1, 1, g.rz),
    "rx": (1, 1, g.rx),
    "cnot": (0, 2, g.cnot),
    "cr": (1, 2, g.cr),
    "toffoli": (0, 3, g.toffoli),
    "swap": (0, 2, g.swap),
}


def parse_circuit(text: str, n: int | None = None, label: str = "") -> Circuit:
    """Parse the one-gate-per-line format.

    ``n`` defaults to one more than the largest qubit index used.
    """
    parsed: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, *args = line.split()
        entry = _TEXT_GATES.get(name)
        if entry is None:
            raise CircuitParseError(lineno, f"unknown gate {name!r}")
        n_angles, n_qubits, factory = entry
        if len(args) != n_angles + n_qubits:
            raise CircuitParseError(lineno, f"{name} expects {n_angles + n_qubits} arguments, got {len(args)}")
        try:
            angles = [float(a) for a in args[:n_angles]]
        except ValueError:
            raise CircuitParseError(lineno, f"bad angle {args[0]!r}") from None
        qubits = []
        for a in args[n_angles:]:
            if not a.isdigit():
                raise CircuitParseError(lineno, f"bad qubit index {a!r}")
            qubits.append(int(a))
        if n is not None and max(qubits) >= n:
            raise CircuitParseError(lineno, f"qubit {max(qubits)} out of range for n={n}")
        try:
            parsed.append(factory(*angles, *qubits))
        except ValueError as exc:
            raise CircuitParseError(lineno, str(exc)) from None
    if n is None:
        n = 1 + max((max(gate.qubits) for gate in parsed), default=0)
    return Circuit(n, parsed, label)


def _gate_line(gate: Gate) -> str:
    k, c, tg = gate.kind, gate.controls, gate.targets
    if k in ("X", "Y", "Z", "H", "S", "T") and not c:
        return f"{k.lower()} {tg[0]}"
    if k in ("RZ", "RX") and not c:
        return f"{k.lower()} {gate.theta!r} {tg[0]}"
    if k == "CNOT" and len(c) == 1:
        return f"cnot {c[0]} {tg[0]}"
    if k == "X" and len(c) == 1:
        return f"cnot {c[0]} {tg[0]}"
    if k == "CR" and len(c) == 1:
        return f"cr {gate.theta!r} {c[0]} {tg[0]}"
    if k in ("TOFFOLI", "CNOT", "X") and len(c) == 2:
        return f"toffoli {c[0]} {c[1]} {tg[0]}"
    if k == "SWAP" and not c:
        return f"swap {tg[0]} {tg[1]}"
    raise ValueError(f"{k} with controls {c} has no text representation")


def dump_circuit(c: Circuit) -> str:
    head = f"# {c.label} n={c.n} gates={len(c)}\n" if c.label else ""
    return head + "".join(_gate_line(gate) + "\n" for gate in c.gates)
