"""Deterministic keyed hashing used for every random decision in the package.

All randomness (edge coins, query priorities, new-start priorities, trial
seeds) is derived from a 64-bit master seed through one mixing function, so
that any run is reproducible from its seed alone and the lazy and explicit
hypergraph backends agree coin-for-coin.

The mixer is the splitmix64 finalizer. It is not cryptographic; it is chosen
because it vectorizes (the same arithmetic runs on numpy uint64 arrays and on
Python ints) while passing standard equidistribution tests, which is what the
query-bound search actually needs. Priorities are 64-bit values; ties are
broken by the canonical vertex tuple, so orderings are total even in the
astronomically unlikely event of a hash collision.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a Python int, mod 2^64."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _M1) & MASK64
    x ^= x >> 27
    x = (x * _M2) & MASK64
    x ^= x >> 31
    return x


def chain64(key: int, values: Iterable[int]) -> int:
    """Hash a sequence of small non-negative ints under ``key``.

    The caller is responsible for canonical ordering (vertex sets must be
    sorted before hashing).
    """
    h = key & MASK64
    for v in values:
        h = mix64(h ^ ((v + 1) & MASK64))
    return h


def derive_key(seed: int, label: str) -> int:
    """Domain-separated subkey: distinct labels give independent streams."""
    h = mix64(seed & MASK64)
    for b in label.encode("utf-8"):
        h = mix64(h ^ (b + 1))
    return mix64(h ^ GOLDEN)


def coin_threshold(p: float) -> int:
    """Map a probability to the acceptance threshold on 64-bit hashes.

    A hash h is a success iff h < threshold; threshold/2^64 equals p up to
    one part in 2^64.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    return min(round(p * (1 << 64)), 1 << 64)


# numpy counterparts; identical arithmetic on uint64 arrays.

_NP_M1 = np.uint64(_M1)
_NP_M2 = np.uint64(_M2)
_NP_30 = np.uint64(30)
_NP_27 = np.uint64(27)
_NP_31 = np.uint64(31)
_NP_1 = np.uint64(1)


def mix64_np(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> _NP_30
    x *= _NP_M1
    x ^= x >> _NP_27
    x *= _NP_M2
    x ^= x >> _NP_31
    return x


def chain64_np(key, cols: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorized chain64. ``key`` is an int or a broadcastable uint64 array;
    each element of ``cols`` is one coordinate column."""
    if isinstance(key, (int, np.integer)):
        key = np.uint64(int(key) & MASK64)
    h = None
    for c in cols:
        c = np.asarray(c).astype(np.uint64, copy=False)
        v = (key if h is None else h) ^ (c + _NP_1)
        h = mix64_np(v)
    if h is None:
        raise ValueError("chain64_np needs at least one column")
    return h


def coin_mask_np(hashes: np.ndarray, threshold: int) -> np.ndarray:
    """Boolean success mask for pre-hashed values under a coin threshold."""
    if threshold <= 0:
        return np.zeros(hashes.shape, dtype=bool)
    if threshold > MASK64:
        return np.ones(hashes.shape, dtype=bool)
    return hashes < np.uint64(threshold)
