"""Counter-based deterministic random numbers.

Every draw is a pure function of (seed, stream, counter), so host code,
re-runs and independent re-implementations produce identical sequences
without carrying generator state around. The mixer is the splitmix64
finalizer applied to a seed/stream/counter chain.

All functions are vectorized over the counter axis and return float64
internally; callers cast to their working precision.
"""

from __future__ import annotations

import numpy as np

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)

# 2**-53, so (x >> 11) * _INV53 covers [0, 1) on 53 bits.
_INV53 = float(2.0**-53)


def _mix(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """splitmix64 finalizer; wraps on uint64 overflow by construction."""
    with np.errstate(over="ignore"):
        x = (x + _GOLDEN) & _U64(0xFFFFFFFFFFFFFFFF)
        x = (x ^ (x >> _U64(30))) * _MIX1
        x = (x ^ (x >> _U64(27))) * _MIX2
        return x ^ (x >> _U64(31))


def hash_u64(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Hash a counter array under a (seed, stream) pair to uint64."""
    base = _mix(_mix(_U64(seed & 0xFFFFFFFFFFFFFFFF)) ^ _U64(stream & 0xFFFFFFFFFFFFFFFF))
    return _mix(counters.astype(_U64) ^ base)


def uniform01(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Uniform draws in [0, 1), one per counter."""
    return (hash_u64(seed, stream, counters) >> _U64(11)).astype(np.float64) * _INV53


def standard_normal(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Standard normal draws, one per counter, via Box-Muller.

    Each output consumes the two sub-counters 2c and 2c+1 so that any
    subset of counters can be evaluated independently.
    """
    c = counters.astype(_U64)
    u1 = uniform01(seed, stream, c * _U64(2))
    u2 = uniform01(seed, stream, c * _U64(2) + _U64(1))
    # 1 - u1 is in (0, 1], keeping the log argument away from zero.
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
