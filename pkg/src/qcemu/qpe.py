"""Quantum phase estimation: gate-level simulation and two dense-matrix emulations.

Phases are reported as fractions of a full turn: eigenvalue ``exp(2*pi*i*phi)``
with ``phi`` in [0, 1).
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuit import Circuit, DenseUnitary, apply_circuit, build_qft, to_dense_matrix
from .costmodel import qpe_costs
from .emulator import DistributionTable, emulate_qft, full_distribution
from .errors import DimensionError, EigenSolverError, NotEigenvectorError
from .gates import apply_gate_raw
from .statevector import StateVector, allocate_amplitudes, new_basis_state

EIGEN_TOL = 1e-8
EIGENVECTOR_TOL = 1e-6


class Strategy(str, enum.Enum):
    SIMULATE = "simulate"
    SQUARE = "square"
    EIGEN = "eigen"


@dataclass
class PhaseEstimate:
    strategy: str
    phi: float
    bits: int
    distribution: DistributionTable | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def outcome(self) -> int:
        return int(round(self.phi * 2 ** self.bits)) % 2 ** self.bits

    def to_json(self) -> dict:
        dist = [] if self.distribution is None else [[o, p] for o, p in self.distribution.items()]
        return {
            "strategy": str(self.strategy),
            "phi": float(self.phi),
            "bits": int(self.bits),
            "distribution": dist,
            "wall_time_s": float(sum(self.timings.values())),
            "timings": {k: float(v) for k, v in self.timings.items()},
        }


def phase_of(z: complex) -> float:
    """Argument of ``z`` as a fraction of a turn in [0, 1)."""
    phi = float(np.angle(z) / (2 * np.pi)) % 1.0
    return 0.0 if phi == 1.0 else phi


def circular_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def _as_matrix(u) -> np.ndarray:
    m = np.asarray(u.matrix if isinstance(u, DenseUnitary) else u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


# --------------------------------------------------------------------------
# gate-level


def simulate_qpe(u: Circuit, prep: Circuit | StateVector | None, b: int,
                 gate_level_iqft: bool = False) -> PhaseEstimate:
    """Coherent QPE with ``b`` ancillas on qubits ``u.n .. u.n + b - 1``.

    ``prep`` is either a circuit applied to ``|0...0>`` or an explicit system
    state.  Ancilla ``j`` controls ``2**j`` repetitions of ``u``'s gate
    sequence.  The inverse QFT on the ancillas is emulated unless
    ``gate_level_iqft`` is set.
    """
    if b < 1:
        raise ValueError("need at least one precision bit")
    n = u.n
    if isinstance(prep, StateVector):
        if prep.n != n:
            raise DimensionError(f"prep state has {prep.n} qubits, unitary acts on {n}")
        system = prep.amps
    else:
        s = new_basis_state(n, 0)
        if prep is not None:
            apply_circuit(s, prep)
        system = s.amps
    total = n + b
    ancillas = list(range(n, total))
    t0 = time.perf_counter()
    amps = allocate_amplitudes(total)
    amps[: 1 << n] = system
    joint = StateVector(total, amps)
    hadamard = 2 ** (-b / 2)
    # H on every ancilla of |0..0>_anc: the system block is copied to each ancilla pattern
    joint.amps.reshape(1 << b, 1 << n)[:] = joint.amps[: 1 << n] * hadamard

    t1 = time.perf_counter()
    for j, anc in enumerate(ancillas):
        ctrl_gates = [gate.controlled(anc) for gate in u.gates]
        for _ in range(2 ** j):
            for gate in ctrl_gates:
                apply_gate_raw(joint.amps, total, gate)
    t2 = time.perf_counter()
    if gate_level_iqft:
        apply_circuit(joint, build_qft(b).inverse().remapped(ancillas, total))
    else:
        joint = emulate_qft(joint, ancillas, inverse=True)
    t3 = time.perf_counter()
    dist = full_distribution(joint, ancillas)
    modal = dist.modal()
    return PhaseEstimate(
        Strategy.SIMULATE.value,
        modal / 2 ** b,
        b,
        dist,
        {"prepare_s": t1 - t0, "apply_controlled_u_s": t2 - t1, "inverse_qft_s": t3 - t2},
    )


# --------------------------------------------------------------------------
# repeated squaring


def repeated_squares(u, count: int) -> list[np.ndarray]:
    """``[U, U^2, U^4, ..., U^(2**(count-1))]`` by successive squaring."""
    m = _as_matrix(u)
    powers = [m]
    for _ in range(count - 1):
        powers.append(powers[-1] @ powers[-1])
    return powers


def square_power(u, k: int) -> np.ndarray:
    """``U^(2**k)`` using ``k`` squarings."""
    m = _as_matrix(u)
    for _ in range(k):
        m = m @ m
    return m


def _rayleigh(m: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(v, m @ v))


def check_eigenvector(u, v) -> tuple[np.ndarray, complex]:
    """Normalized ``v`` and its eigenvalue; raises unless ``||Uv - lv|| < 1e-6``."""
    m = _as_matrix(u)
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if v.shape != (m.shape[0],) or norm == 0:
        raise DimensionError("eigenvector candidate has the wrong shape or is zero")
    v = v / norm
    lam = _rayleigh(m, v)
    res = float(np.linalg.norm(m @ v - lam * v))
    if res >= EIGENVECTOR_TOL:
        raise NotEigenvectorError(f"||Uv - lambda v|| = {res:.3e} exceeds {EIGENVECTOR_TOL}")
    return v, lam


def emulate_qpe_squaring(u, v, b: int) -> PhaseEstimate:
    """b-bit phase of eigenvector ``v`` from the Rayleigh quotients of ``U^(2**j)``.

    Bits are fixed from the highest power down, as the iterative circuit
    would: stage ``j`` sees ``2**j * phi mod 1`` and picks the one new bit
    consistent with the bits already known.
    """
    if b < 1:
        raise ValueError("need at least one precision bit")
    v, _ = check_eigenvector(u, v)
    t0 = time.perf_counter()
    powers = repeated_squares(u, b)
    t1 = time.perf_counter()
    known = 0  # value of the low (b - j - 1) bits of round(phi * 2**b)
    for j in range(b - 1, -1, -1):
        width = b - j
        est = phase_of(_rayleigh(powers[j], v)) * 2 ** width
        cands = [known, known + 2 ** (width - 1)]
        known = min(cands, key=lambda c: circular_distance(c / 2 ** width, est / 2 ** width))
    t2 = time.perf_counter()
    return PhaseEstimate(Strategy.SQUARE.value, known / 2 ** b, b, None,
                         {"squaring_s": t1 - t0, "readout_s": t2 - t1})


# --------------------------------------------------------------------------
# eigendecomposition


def emulate_qpe_eigen(u) -> list[tuple[float, np.ndarray]]:
    """All ``(phi_k, v_k)`` pairs of a dense unitary, sorted by phase.

    Delegates to LAPACK's general complex eigensolver (Hessenberg reduction
    followed by shifted QR), then verifies unit modulus and residuals.
    """
    m = _as_matrix(u)
    try:
        lam, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver failed to converge: {exc}") from exc
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    mod_err = float(np.max(np.abs(np.abs(lam) - 1)))
    res = float(np.max(np.linalg.norm(m @ vecs - vecs * lam, axis=0)))
    if mod_err > EIGEN_TOL or res > EIGEN_TOL:
        raise EigenSolverError(f"eigenpairs not unitary-consistent: ||lambda|-1| = {mod_err:.2e}, residual {res:.2e}")
    pairs = [(phase_of(l), vecs[:, k]) for k, l in enumerate(lam)]
    pairs.sort(key=lambda p: p[0])
    return pairs


def eigen_estimate(u, v, b: int) -> PhaseEstimate:
    """Eigen-path analogue of QPE: the phase of the eigenvector overlapping ``v`` most."""
    m = _as_matrix(u)
    v = np.asarray(v, dtype=complex)
    t0 = time.perf_counter()
    pairs = emulate_qpe_eigen(m)
    t1 = time.perf_counter()
    phi, _ = max(pairs, key=lambda p: abs(np.vdot(p[1], v)))
    y = int(round(phi * 2 ** b)) % 2 ** b
    return PhaseEstimate(Strategy.EIGEN.value, y / 2 ** b, b, None, {"eigensolver_s": t1 - t0})


# --------------------------------------------------------------------------
# strategy choice


def select_strategy(n: int, b: int, G: int, coherent: bool = False, strassen: bool = False,
                    weights: Mapping[str, float] | None = None) -> Strategy:
    """Cheapest strategy under the asymptotic cost model.

    ``weights`` rescales each path's cost (e.g. from calibration).  Ties go to
    simulation first, then squaring.
    """
    costs = qpe_costs(n, b, G, coherent, strassen)
    if weights:
        costs = costs.scaled(weights)
    order = [Strategy.SIMULATE, Strategy.SQUARE, Strategy.EIGEN]
    values = [costs.simulate, costs.square, costs.eigen]
    return order[int(np.argmin(values))]


def dense_with_timing(c: Circuit) -> tuple[DenseUnitary, float]:
    t0 = time.perf_counter()
    u = to_dense_matrix(c)
    return u, time.perf_counter() - t0
