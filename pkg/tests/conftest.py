import numpy as np
import pytest

from qcemu import gates as g


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def kron_oracle(u, target, n):
    """Dense 2**n operator of a single-qubit ``u`` on ``target`` (LSB-first indexing)."""
    ops = [np.eye(2)] * n
    ops[n - 1 - target] = u
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def dft_matrix(n, sign=+1):
    N = 1 << n
    k = np.arange(N)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)


def random_gate(rng, n):
    kind = rng.choice(["H", "X", "Y", "Z", "S", "T", "RZ", "RX", "CNOT", "CR", "TOFFOLI", "SWAP"])
    qs = [int(q) for q in rng.choice(n, size=min(n, 3), replace=False)]
    th = float(rng.uniform(-np.pi, np.pi))
    if kind in ("CNOT", "CR", "SWAP") and n < 2 or kind == "TOFFOLI" and n < 3:
        kind = "H"
    return {
        "H": lambda: g.h(qs[0]), "X": lambda: g.x(qs[0]), "Y": lambda: g.y(qs[0]), "Z": lambda: g.z(qs[0]),
        "S": lambda: g.s(qs[0]), "T": lambda: g.t(qs[0]), "RZ": lambda: g.rz(th, qs[0]),
        "RX": lambda: g.rx(th, qs[0]), "CNOT": lambda: g.cnot(qs[0], qs[1]),
        "CR": lambda: g.cr(th, qs[0], qs[1]), "TOFFOLI": lambda: g.toffoli(qs[0], qs[1], qs[2]),
        "SWAP": lambda: g.swap(qs[0], qs[1]),
    }[kind]()
