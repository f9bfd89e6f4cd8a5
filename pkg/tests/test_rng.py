"""Counter-RNG oracles: a pure-Python reimplementation pins the bit stream."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpuviz import rng

MASK = (1 << 64) - 1


def py_mix(x: int) -> int:
    """Independent splitmix64 finalizer on Python ints."""
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def py_hash(seed: int, stream: int, counter: int) -> int:
    base = py_mix(py_mix(seed & MASK) ^ (stream & MASK))
    return py_mix((counter ^ base) & MASK)


def py_uniform(seed: int, stream: int, counter: int) -> float:
    return (py_hash(seed, stream, counter) >> 11) * 2.0**-53


def py_normal(seed: int, stream: int, counter: int) -> float:
    u1 = py_uniform(seed, stream, 2 * counter)
    u2 = py_uniform(seed, stream, 2 * counter + 1)
    return math.sqrt(-2.0 * math.log1p(-u1)) * math.cos(2.0 * math.pi * u2)


def test_hash_matches_python_oracle():
    counters = np.arange(64, dtype=np.uint64)
    got = rng.hash_u64(42, 7, counters)
    expected = np.array([py_hash(42, 7, int(c)) for c in counters], dtype=np.uint64)
    np.testing.assert_array_equal(got, expected)


@given(st.integers(0, MASK), st.integers(0, MASK), st.integers(0, MASK))
@settings(max_examples=50, deadline=None)
def test_hash_property_matches_oracle(seed, stream, counter):
    got = rng.hash_u64(seed, stream, np.array([counter], dtype=np.uint64))
    assert int(got[0]) == py_hash(seed, stream, counter)


def test_uniform_matches_python_oracle():
    counters = np.arange(32, dtype=np.uint64)
    got = rng.uniform01(3, 5, counters)
    expected = [py_uniform(3, 5, int(c)) for c in counters]
    np.testing.assert_array_equal(got, expected)


def test_uniform_range_and_determinism():
    counters = np.arange(100_000, dtype=np.uint64)
    a = rng.uniform01(0, 0, counters)
    b = rng.uniform01(0, 0, counters)
    np.testing.assert_array_equal(a, b)
    assert a.min() >= 0.0 and a.max() < 1.0
    assert abs(a.mean() - 0.5) < 0.01


def test_streams_decorrelate():
    counters = np.arange(1000, dtype=np.uint64)
    a = rng.uniform01(0, 0, counters)
    b = rng.uniform01(0, 1, counters)
    assert not np.array_equal(a, b)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_normal_matches_python_oracle():
    counters = np.arange(16, dtype=np.uint64)
    got = rng.standard_normal(9, 2, counters)
    expected = [py_normal(9, 2, int(c)) for c in counters]
    np.testing.assert_allclose(got, expected, rtol=0, atol=0)


def test_normal_moments():
    z = rng.standard_normal(1, 0, np.arange(200_000, dtype=np.uint64))
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    assert np.isfinite(z).all()


def test_normal_subset_independence():
    """Evaluating a counter subset gives the same values as the full range."""
    full = rng.standard_normal(5, 3, np.arange(100, dtype=np.uint64))
    subset = rng.standard_normal(5, 3, np.array([7, 42, 99], dtype=np.uint64))
    np.testing.assert_array_equal(subset, full[[7, 42, 99]])


@pytest.mark.parametrize("seed,stream,counter,expected", [
    # frozen from the Python oracle above; guards against silent mixer edits
    (0, 0, 0, py_hash(0, 0, 0)),
    (1, 0, 0, py_hash(1, 0, 0)),
    (0, 0, 2**64 - 1, py_hash(0, 0, 2**64 - 1)),
])
def test_hash_frozen_values(seed, stream, counter, expected):
    got = rng.hash_u64(seed, stream, np.array([counter], dtype=np.uint64))
    assert int(got[0]) == expected
