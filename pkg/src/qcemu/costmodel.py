"""Analytic runtime models for FFT vs. gate-level QFT and for QPE strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateFitError

LOG2_7 = math.log2(7)


@dataclass(frozen=True)
class MachineParams:
    """Machine constants; bandwidths in bytes/s, ``p`` nodes.

    Defaults give 20 GFLOPS achieved FFT throughput, 40 GB/s memory
    bandwidth and one FDR InfiniBand link (56 Gb/s) of injection bandwidth.
    """

    flops_peak: float = 160e9
    eff_fft: float = 0.125
    b_mem: float = 40e9
    b_net: float = 7e9
    p: int = 1

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")
        if self.eff_fft > 1:
            raise ValueError("eff_fft must be <= 1")

    @property
    def flops_achieved(self) -> float:
        return self.eff_fft * self.flops_peak

    @classmethod
    def from_config(cls, text: str, base: "MachineParams | None" = None) -> "MachineParams":
        """Parse ``key = value`` lines; ``#`` comments and blank lines ignored."""
        base = base or cls()
        known = {f.name for f in fields(cls)}
        updates = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep or key not in known:
                raise ValueError(f"machine config line {lineno}: expected one of {sorted(known)} = value")
            updates[key] = int(value) if key == "p" else float(value)
        return replace(base, **updates)

    @classmethod
    def load(cls, path) -> "MachineParams":
        with open(path) as fh:
            return cls.from_config(fh.read())


def t_fft(n: int, m: MachineParams) -> float:
    """Distributed 1D FFT: 5 N n flops plus three all-to-all transposes."""
    size = 2.0 ** n
    return 5 * size * n / m.flops_achieved + 3 * 16 * size / m.b_net


def t_qft(n: int, m: MachineParams) -> float:
    """Gate-level QFT: n^2/2 diagonal ops streaming a quarter of the vector each."""
    size = 2.0 ** n
    return 4 * size * n * n / m.b_mem + math.log2(m.p) * 16 * size / m.b_net


def fft_comm_time(n: int, m: MachineParams) -> float:
    return 3 * 16 * 2.0 ** n / m.b_net


def qft_comm_time(n: int, m: MachineParams) -> float:
    return math.log2(m.p) * 16 * 2.0 ** n / m.b_net


# --------------------------------------------------------------------------
# QPE


@dataclass(frozen=True)
class QpeCosts:
    """Abstract operation counts (constant factors 1) for the three strategies."""

    simulate: float
    square: float
    eigen: float

    def as_dict(self) -> dict[str, float]:
        return {"simulate": self.simulate, "square": self.square, "eigen": self.eigen}

    def scaled(self, weights: Mapping[str, float]) -> "QpeCosts":
        return QpeCosts(**{k: v * weights.get(k, 1.0) for k, v in self.as_dict().items()})


def qpe_costs(n: int, b: int, G: int, coherent: bool = False, strassen: bool = False) -> QpeCosts:
    if min(n, b, G) < 1:
        raise ValueError("n, b and G must all be >= 1")
    sim_exp = n + (2 * b if coherent else b)
    mm_exp = LOG2_7 * n if strassen else 3 * n
    dense = G * 2.0 ** (2 * n)
    return QpeCosts(
        simulate=G * 2.0 ** sim_exp,
        square=dense + b * 2.0 ** mm_exp,
        eigen=dense + 2.0 ** (3 * n),
    )


def crossover_bits(n: int, G: int, path: str, coherent: bool = False, strassen: bool = False,
                   b_max: int = 1024) -> int | None:
    """Smallest precision at which ``path`` ('square' or 'eigen') is cheaper than simulation."""
    for b in range(1, b_max + 1):
        c = qpe_costs(n, b, G, coherent, strassen)
        if getattr(c, path) < c.simulate:
            return b
    return None


def crossover_from_timings(t_apply: float, t_dense: float, t_gemm: float, t_eig: float,
                           b_max: int = 64) -> tuple[int | None, int | None]:
    """Crossover bits from measured per-step times.

    Simulation applies U ``2**b - 1`` times; squaring pays dense construction
    plus ``b`` matrix products; the eigensolver pays construction plus one
    decomposition regardless of ``b``.
    """
    b_sq = b_eig = None
    for b in range(1, b_max + 1):
        sim = (2 ** b - 1) * t_apply
        if b_sq is None and t_dense + b * t_gemm < sim:
            b_sq = b
        if b_eig is None and t_dense + t_eig < sim:
            b_eig = b
        if b_sq is not None and b_eig is not None:
            break
    return b_sq, b_eig


# --------------------------------------------------------------------------
# calibration


@dataclass
class Calibration:
    """Fitted constants; ``None`` marks a constant no sample constrained."""

    flops_achieved: float | None = None
    b_mem: float | None = None
    b_net: float | None = None
    residuals: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def absent(self) -> list[str]:
        return [k for k in ("flops_achieved", "b_mem", "b_net") if getattr(self, k) is None]

    def to_machine_params(self, base: MachineParams | None = None) -> MachineParams:
        base = base or MachineParams()
        updates = {}
        if self.flops_achieved is not None:
            updates["flops_peak"] = self.flops_achieved / base.eff_fft
        if self.b_mem is not None:
            updates["b_mem"] = self.b_mem
        if self.b_net is not None:
            updates["b_net"] = self.b_net
        return replace(base, **updates)


def _fit(rows: list[list[float]], t: list[float], path: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(rows, dtype=float)
    y = np.array(t, dtype=float)
    keep = np.any(a != 0, axis=0)
    a = a[:, keep]
    if a.shape[0] < 2 or a.shape[1] == 0:
        raise DegenerateFitError(f"{path}: need at least 2 samples with nonzero model terms")
    # column scaling keeps the normal equations well conditioned
    scale = np.linalg.norm(a, axis=0)
    coef, _, rank, sv = np.linalg.lstsq(a / scale, y, rcond=None)
    if rank < a.shape[1] or sv[-1] < 1e-10 * sv[0]:
        raise DegenerateFitError(f"{path}: singular fit (rank {rank} of {a.shape[1]})")
    coef = coef / scale
    if np.any(coef <= 0):
        raise DegenerateFitError(f"{path}: fitted inverse rates must be positive, got {coef}")
    full = np.zeros(keep.size)
    full[keep] = coef
    return full, y - a @ coef


def calibrate(samples: Mapping[str, Sequence[tuple[int, float]]], p: int = 1) -> Calibration:
    """Least-squares fit of machine constants to measured ``(n, seconds)`` samples.

    Recognized paths are ``"fft"`` (fits achieved flops and network
    bandwidth) and ``"qft"`` (fits memory bandwidth, plus network bandwidth
    when ``p > 1``).  Fitting is linear in the inverse rates.
    """
    unknown = set(samples) - {"fft", "qft"}
    if unknown:
        raise ValueError(f"unknown calibration paths {sorted(unknown)}")
    if not any(samples.values()):
        raise DegenerateFitError("no samples to fit")
    out = Calibration()
    net_estimates = []
    if samples.get("fft"):
        rows = [[5 * 2.0 ** n * n, 48 * 2.0 ** n] for n, _ in samples["fft"]]
        coef, res = _fit(rows, [t for _, t in samples["fft"]], "fft")
        out.flops_achieved = 1 / coef[0]
        net_estimates.append(1 / coef[1])
        out.residuals["fft"] = res
    if samples.get("qft"):
        rows = [[4 * 2.0 ** n * n * n, math.log2(p) * 16 * 2.0 ** n] for n, _ in samples["qft"]]
        coef, res = _fit(rows, [t for _, t in samples["qft"]], "qft")
        out.b_mem = 1 / coef[0]
        if coef[1] > 0:
            net_estimates.append(1 / coef[1])
        out.residuals["qft"] = res
    if net_estimates:
        out.b_net = float(np.mean(net_estimates))
    return out
