"""Reversible arithmetic built from CNOT/Toffoli: the gate-level path.

All three circuits rest on the Cuccaro ripple-carry adder (one carry
ancilla).  Multiplication is shift-and-add into ``c``; division is restoring
subtract-and-shift, where the less/equal test is read off the adder's
overflow bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gates as g
from .circuit import Circuit
from .errors import LayoutError, RegisterNotClearError
from .gates import Gate
from .statevector import StateVector, allocate_amplitudes, gather_bits, scatter_bits

OPS = ("add", "mul", "div")


def ancilla_count(op: str, m: int) -> int:
    """Work qubits needed by :func:`build_adder`, :func:`build_multiplier`, :func:`build_divider`."""
    if m < 1:
        raise ValueError("register width must be >= 1")
    if op == "add":
        return 1
    if op == "mul":
        # carry + copy register for the controlled addend
        return 1 + m
    if op == "div":
        # high remainder bits, borrow, carry, copy register, b == 0 flag chain
        return (m - 1) + 1 + 1 + m + max(m - 1, 1)
    raise ValueError(f"unknown arithmetic op {op!r}; expected one of {OPS}")


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit positions of the integer registers, least significant bit first."""

    m: int
    a_qubits: tuple[int, ...]
    b_qubits: tuple[int, ...]
    c_qubits: tuple[int, ...] = ()
    ancilla_qubits: tuple[int, ...] = ()
    n: int = field(default=0)

    def __post_init__(self):
        for name in ("a_qubits", "b_qubits", "c_qubits", "ancilla_qubits"):
            object.__setattr__(self, name, tuple(int(q) for q in getattr(self, name)))
        for name in ("a_qubits", "b_qubits"):
            if len(getattr(self, name)) != self.m:
                raise LayoutError(f"{name} must have {self.m} qubits")
        if self.c_qubits and len(self.c_qubits) != self.m:
            raise LayoutError(f"c_qubits must have {self.m} qubits")
        everything = self.a_qubits + self.b_qubits + self.c_qubits + self.ancilla_qubits
        if len(set(everything)) != len(everything):
            raise LayoutError("register qubit lists overlap")
        if min(everything) < 0:
            raise LayoutError("negative qubit index")
        needed = max(everything) + 1
        if self.n == 0:
            object.__setattr__(self, "n", needed)
        elif self.n < needed:
            raise LayoutError(f"layout uses qubit {needed - 1} but n={self.n}")

    @classmethod
    def for_op(cls, op: str, m: int) -> "RegisterLayout":
        """Contiguous layout: a, b, c, then the op's work qubits."""
        extra = ancilla_count(op, m)
        c = tuple(range(2 * m, 3 * m)) if op != "add" else ()
        start = 3 * m if op != "add" else 2 * m
        return cls(m, tuple(range(m)), tuple(range(m, 2 * m)), c, tuple(range(start, start + extra)))

    @classmethod
    def compact(cls, m: int) -> "RegisterLayout":
        """The 3m-qubit a, b, c layout with no work qubits (what the emulator needs)."""
        return cls(m, tuple(range(m)), tuple(range(m, 2 * m)), tuple(range(2 * m, 3 * m)))

    @property
    def register_qubits(self) -> tuple[int, ...]:
        return self.a_qubits + self.b_qubits + self.c_qubits

    def encode(self, a: int = 0, b: int = 0, c: int = 0) -> int:
        idx = scatter_bits(a, self.a_qubits) | scatter_bits(b, self.b_qubits)
        if self.c_qubits:
            idx |= scatter_bits(c, self.c_qubits)
        return idx

    def decode(self, index):
        """``(a, b, c)`` register values for a basis index or integer array."""
        c = gather_bits(index, self.c_qubits) if self.c_qubits else index * 0
        return gather_bits(index, self.a_qubits), gather_bits(index, self.b_qubits), c


def _need(layout: RegisterLayout, op: str, with_c: bool = True) -> None:
    if with_c and len(layout.c_qubits) != layout.m:
        raise LayoutError(f"{op} needs a c register of {layout.m} qubits")
    need = ancilla_count(op, layout.m)
    if len(layout.ancilla_qubits) < need:
        raise LayoutError(f"{op} on {layout.m} bits needs {need} ancillas, layout has {len(layout.ancilla_qubits)}")


def cuccaro_add(addend: Sequence[int], target: Sequence[int], carry: int, carry_out: int | None = None) -> list[Gate]:
    """``target += addend`` (mod 2**w) with a clean carry ancilla.

    When ``carry_out`` is given the overflow bit is XORed into it.
    """
    w = len(addend)
    if len(target) != w or w == 0:
        raise LayoutError("adder operands must have equal nonzero width")
    ops: list[Gate] = []
    prev = [carry, *addend[:-1]]
    for i in range(w):  # MAJ ladder
        x, yq, zq = prev[i], target[i], addend[i]
        ops += [g.cnot(zq, yq), g.cnot(zq, x), g.toffoli(x, yq, zq)]
    if carry_out is not None:
        ops.append(g.cnot(addend[-1], carry_out))
    for i in reversed(range(w)):  # UMA ladder
        x, yq, zq = prev[i], target[i], addend[i]
        ops += [g.toffoli(x, yq, zq), g.cnot(zq, x), g.cnot(x, yq)]
    return ops


def build_adder(layout: RegisterLayout) -> Circuit:
    """(a, b, 0) -> (a, a + b mod 2**m, 0)."""
    _need(layout, "add", with_c=False)
    c = Circuit(layout.n, label=f"add{layout.m}")
    c.extend(cuccaro_add(layout.a_qubits, layout.b_qubits, layout.ancilla_qubits[0]))
    return c


def _controlled_copy(ctrl: int, src: Sequence[int], dst: Sequence[int]) -> list[Gate]:
    return [g.toffoli(ctrl, s_, d) for s_, d in zip(src, dst)]


def build_multiplier(layout: RegisterLayout) -> Circuit:
    """(a, b, 0) -> (a, b, a*b mod 2**m).

    For each bit ``b_i`` the low ``m - i`` bits of ``a`` are copied (under
    control of ``b_i``) into a scratch register, added into ``c[i:]``, and
    the copy is undone.
    """
    _need(layout, "mul")
    m = layout.m
    carry, tmp = layout.ancilla_qubits[0], layout.ancilla_qubits[1:1 + m]
    a, b, cq = layout.a_qubits, layout.b_qubits, layout.c_qubits
    c = Circuit(layout.n, label=f"mul{m}")
    for i in range(m):
        w = m - i
        copy = _controlled_copy(b[i], a[:w], tmp[:w])
        c.extend(copy)
        c.extend(cuccaro_add(tmp[:w], cq[i:], carry))
        c.extend(copy)
    return c


def _zero_flag(b: Sequence[int], flags: Sequence[int]) -> list[Gate]:
    """Compute ``flags[-1] ^= (b == 0)`` using ``flags[:-1]`` as an AND chain."""
    negate = [g.x(q) for q in b]
    if len(b) == 1:
        chain = [g.cnot(b[0], flags[0])]
    else:
        chain = [g.toffoli(b[0], b[1], flags[0])]
        chain += [g.toffoli(flags[k - 2], b[k], flags[k - 1]) for k in range(2, len(b))]
    return negate + chain + negate


def build_divider(layout: RegisterLayout) -> Circuit:
    """(a, b, 0) -> (a mod b, b, a // b); identity when b == 0.

    Restoring division over a (2m-1)-bit remainder ``a || hi``.  Step ``i``
    subtracts ``b`` from the m-bit window starting at bit ``i`` via
    ``~(~W + b)``; the adder overflow is the borrow, i.e. ``b > W``.  The
    quotient bit is ``not borrow and b != 0``; a borrow triggers a controlled
    add-back, after which the borrow equals ``not q_i`` (or 0 when b == 0)
    and is cleared from the quotient bit.
    """
    _need(layout, "div")
    m = layout.m
    anc = layout.ancilla_qubits
    hi = anc[:m - 1]
    borrow, carry = anc[m - 1], anc[m]
    tmp = anc[m + 1:2 * m + 1]
    flags = anc[2 * m + 1:2 * m + 1 + max(m - 1, 1)]
    zero = flags[-1]
    a, b, q = layout.a_qubits, layout.b_qubits, layout.c_qubits
    rem = a + hi

    c = Circuit(layout.n, label=f"div{m}")
    flag_ops = _zero_flag(b, flags)
    c.extend(flag_ops)
    for i in range(m - 1, -1, -1):
        win = rem[i:i + m]
        flip = [g.x(w) for w in win]
        c.extend(flip)
        c.extend(cuccaro_add(b, win, carry, carry_out=borrow))
        c.extend(flip)
        c.extend([g.x(borrow), g.x(zero), g.toffoli(borrow, zero, q[i]), g.x(borrow), g.x(zero)])
        copy = _controlled_copy(borrow, b, tmp)
        c.extend(copy)
        c.extend(cuccaro_add(tmp, win, carry))
        c.extend(copy)
        c.extend([g.x(q[i]), g.x(zero), g.toffoli(q[i], zero, borrow), g.x(q[i]), g.x(zero)])
    c.extend(flag_ops[::-1])
    return c


BUILDERS = {"add": build_adder, "mul": build_multiplier, "div": build_divider}


# --------------------------------------------------------------------------
# moving states between the compact (emulator) and full (simulator) layouts


def _index_map(src: RegisterLayout, dst: RegisterLayout) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices of the compact register space in ``src`` and ``dst`` coordinates."""
    k = len(src.register_qubits)
    if len(dst.register_qubits) != k:
        raise LayoutError("layouts have different register widths")
    vals = np.arange(1 << k)
    return (
        scatter_bits(vals, src.register_qubits),
        scatter_bits(vals, dst.register_qubits),
    )


def embed(state: StateVector, src: RegisterLayout, dst: RegisterLayout) -> StateVector:
    """Copy a state whose only qubits are ``src``'s registers into ``dst`` with zeroed work qubits."""
    if state.n != src.n:
        raise LayoutError(f"state has {state.n} qubits, layout {src.n}")
    s_idx, d_idx = _index_map(src, dst)
    amps = allocate_amplitudes(dst.n)
    amps[d_idx] = state.amps[s_idx]
    return StateVector(dst.n, amps)


def strip_work_qubits(state: StateVector, layout: RegisterLayout, compact: RegisterLayout, tol: float = 1e-12) -> StateVector:
    """Inverse of :func:`embed`; raises if any work qubit is left dirty."""
    s_idx, d_idx = _index_map(compact, layout)
    kept = state.amps[d_idx]
    leftover = state.amps.copy()
    leftover[d_idx] = 0
    worst = int(np.argmax(np.abs(leftover)))
    if abs(leftover[worst]) > tol:
        raise RegisterNotClearError(worst, leftover[worst], register="ancilla")
    amps = allocate_amplitudes(compact.n)
    amps[s_idx] = kept
    return StateVector(compact.n, amps)
