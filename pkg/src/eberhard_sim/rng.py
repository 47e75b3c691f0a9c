"""Counter-based random stream (Philox4x64-10) evaluated over numpy arrays.

Every uniform is a pure function of ``(seed, theta_index, trial_index, slot)``,
so any subset of trials can be generated in any order, on any worker, and
the values will match a serial run bit for bit.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_ROUNDS = 10

# Second key word; lets this stream be told apart from other uses of the same seed.
STREAM_TAG = 0x4542455248415244

SEED_MAX = 2**64 - 1
UNIFORMS_PER_BLOCK = 4


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a0, a1 = a & _LO32, a >> _S32
    b0, b1 = b & _LO32, b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _S32) + (p01 & _LO32) + (p10 & _LO32)
    hi = p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
    lo = a * b
    return hi, lo


def philox4x64(counter: np.ndarray, key: tuple[int, int]) -> np.ndarray:
    """Apply the Philox4x64-10 bijection to a ``(4, n)`` uint64 counter array.

    Returns a new ``(4, n)`` uint64 array.
    """
    c0, c1, c2, c3 = (np.asarray(w, dtype=np.uint64) for w in counter)
    k0, k1 = np.uint64(key[0]), np.uint64(key[1])
    with np.errstate(over="ignore"):
        for i in range(_ROUNDS):
            if i:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3])


def to_unit_interval(words: np.ndarray) -> np.ndarray:
    """Map uint64 words to doubles in [0, 1) using the top 53 bits."""
    return (words >> _S11).astype(np.float64) * (1.0 / 2**53)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def uniforms(seed: int, theta_index: int, trial_indices, n_slots: int) -> np.ndarray:
    """Return an ``(n_slots, n)`` array of uniforms in [0, 1).

    Slot ``k`` of trial ``t`` comes from Philox block ``k // 4``, word ``k % 4``,
    with counter ``(block, t, theta_index, 0)`` and key ``(seed, STREAM_TAG)``.
    """
    seed = check_seed(seed)
    if theta_index < 0:
        raise ValueError("theta_index must be non-negative")
    trials = np.atleast_1d(np.asarray(trial_indices, dtype=np.int64))
    if trials.size and trials.min() < 0:
        raise ValueError("trial indices must be non-negative")
    trials = trials.astype(np.uint64)
    n_blocks = -(-n_slots // UNIFORMS_PER_BLOCK)
    zeros = np.zeros_like(trials)
    theta_word = np.full_like(trials, theta_index)
    out = []
    for block in range(n_blocks):
        ctr = np.stack([np.full_like(trials, block), trials, theta_word, zeros])
        out.append(to_unit_interval(philox4x64(ctr, (seed, STREAM_TAG))))
    return np.concatenate(out, axis=0)[:n_slots]
