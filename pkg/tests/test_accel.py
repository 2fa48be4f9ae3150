"""Kernel-pair equivalence: the jitted and numpy paths must agree."""

import numpy as np
import pytest

from imcsi import accel

MASK = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15


def reference_splitmix(key, counter, n):
    """Pure-Python SplitMix64 in counter mode (independent of the kernels)."""
    out = []
    for i in range(n):
        z = (key + ((counter + i + 1) * GAMMA & MASK)) & MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_numpy_path_matches_pure_python_reference():
    got = accel.fill_u64_numpy(np.uint64(12345), np.uint64(7), 16)
    assert [int(x) for x in got] == reference_splitmix(12345, 7, 16)


def test_numpy_path_handles_large_key_and_counter():
    key = 0xFEDCBA9876543210
    counter = 2**63 + 11
    got = accel.fill_u64_numpy(np.uint64(key), np.uint64(counter), 8)
    assert [int(x) for x in got] == reference_splitmix(key, counter, 8)


@pytest.mark.skipif(not accel.USING_NUMBA, reason="numba path not active")
def test_jit_fill_matches_numpy_fill_exactly():
    for key, counter, n in [(0, 0, 64), (2**64 - 1, 123, 33), (42, 2**62, 7)]:
        a = accel.fill_u64_jit(np.uint64(key), np.uint64(counter), n)
        b = accel.fill_u64_numpy(np.uint64(key), np.uint64(counter), n)
        assert np.array_equal(a, b)


def _random_accumulate_inputs(rng, n_rb=6, n_paths=5, nr=3, nt=8):
    coeff = rng.standard_normal((n_rb, n_paths)) + 1j * rng.standard_normal((n_rb, n_paths))
    a_rx = rng.standard_normal((n_paths, nr)) + 1j * rng.standard_normal((n_paths, nr))
    a_tx = rng.standard_normal((n_paths, nt)) + 1j * rng.standard_normal((n_paths, nt))
    return coeff, a_rx, a_tx


def test_accumulate_numpy_matches_loop_oracle():
    rng = np.random.default_rng(0)
    coeff, a_rx, a_tx = _random_accumulate_inputs(rng)
    got = accel.accumulate_paths_numpy(coeff, a_rx, a_tx)
    want = np.zeros_like(got)
    for rb in range(coeff.shape[0]):
        for p in range(coeff.shape[1]):
            want[rb] += coeff[rb, p] * np.outer(a_rx[p], a_tx[p])
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


@pytest.mark.skipif(not accel.USING_NUMBA, reason="numba path not active")
def test_accumulate_paths_jit_matches_numpy():
    rng = np.random.default_rng(1)
    coeff, a_rx, a_tx = _random_accumulate_inputs(rng, n_rb=12, n_paths=20, nr=4, nt=32)
    a = accel.accumulate_paths_jit(coeff, a_rx, a_tx)
    b = accel.accumulate_paths_numpy(coeff, a_rx, a_tx)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
