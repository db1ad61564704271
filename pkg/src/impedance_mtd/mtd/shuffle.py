from __future__ import annotations

import math

import numpy as np


def random_permutation(rng_stream: np.random.Generator, n: int) -> tuple:
    """Fisher-Yates shuffle of ``range(n)`` driven by ``rng_stream``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    perm = list(range(n))
    if n < 2:
        return tuple(perm)
    # j_i uniform on 0..i for i = n-1 .. 1
    js = rng_stream.integers(0, np.arange(n, 1, -1))
    for i, j in zip(range(n - 1, 0, -1), js.tolist()):
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


def permutation_entropy_bits(n: int) -> float:
    """log2(n!), the configuration entropy of a uniform permutation of n items."""
    return math.lgamma(n + 1) / math.log(2)


def invert(perm) -> tuple:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def is_permutation(perm, n: int | None = None) -> bool:
    m = len(perm) if n is None else n
    return len(perm) == m and sorted(perm) == list(range(m))


def seq_encode(bits, perm) -> np.ndarray:
    """Storage order under the register-sequence multiplexer: slot j gets ``bits[perm[j]]``."""
    bits = np.asarray(bits)
    return bits[np.asarray(perm, dtype=np.intp)] if len(perm) else bits.copy()


def seq_decode(stored, perm) -> np.ndarray:
    stored = np.asarray(stored)
    out = np.empty_like(stored)
    out[np.asarray(perm, dtype=np.intp)] = stored
    return out
