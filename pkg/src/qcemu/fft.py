"""Iterative radix-2 FFT, batched over leading axes.

Uses the quantum sign convention by default: ``X[l] = 2**(-k/2) *
sum_j x[j] * exp(+2*pi*i*j*l / 2**k)``.  ``inverse=True`` flips the sign.
"""

from __future__ import annotations

import numpy as np


def bit_reverse_indices(k: int) -> np.ndarray:
    idx = np.arange(1 << k)
    rev = np.zeros_like(idx)
    for b in range(k):
        rev |= ((idx >> b) & 1) << (k - 1 - b)
    return rev


def fft_radix2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Transform the last axis of a C-contiguous complex array in place.

    Decimation in time: bit-reversal shuffle, then ``k`` butterfly stages,
    each a vectorized pass over the whole array.
    """
    size = x.shape[-1]
    k = size.bit_length() - 1
    if size != 1 << k:
        raise ValueError(f"transform length must be a power of two, got {size}")
    if not x.flags.c_contiguous:
        raise ValueError("fft_radix2 needs a C-contiguous array")
    flat = x.reshape(-1, size)
    flat[...] = flat[:, bit_reverse_indices(k)]
    sign = -1.0 if inverse else 1.0
    half = 1
    while half < size:
        w = np.exp(sign * 1j * np.pi * np.arange(half) / half)
        blocks = flat.reshape(flat.shape[0], size // (2 * half), 2, half)
        even = blocks[:, :, 0, :]
        odd = blocks[:, :, 1, :]
        odd *= w
        even += odd
        # odd_new = even_old - t = (even_old + t) - 2t
        odd *= -2.0
        odd += even
        half *= 2
    flat *= 2.0 ** (-k / 2)
    return x


def dft_oracle(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Direct O(N^2) summation; reference only."""
    size = x.shape[-1]
    j = np.arange(size)
    sign = -1.0 if inverse else 1.0
    mat = np.exp(sign * 2j * np.pi * np.outer(j, j) / size) / np.sqrt(size)
    return x @ mat.T
