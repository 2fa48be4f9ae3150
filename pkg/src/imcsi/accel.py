"""Hot numeric kernels: numba-jitted with pure-numpy fallbacks.

The two kernels here dominate dataset generation time (bulk pseudo-random
fill and multipath accumulation). Everything else in the package is
BLAS/FFT-shaped and stays plain numpy.

Selection: the environment variable ``IMCSI_NUMBA`` ("0"/"false"/"off"
disables) picks the path at import time; the default is the jitted path
when numba is importable. Both paths of ``fill_u64`` are bit-identical
(pure uint64 arithmetic). ``accumulate_paths`` may differ between paths
at rounding level because the summation order differs; each path is
individually deterministic. ``benchmarks/bench_kernels.py`` times the two
paths side by side.
"""

import os

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _numba_requested() -> bool:
    return os.environ.get("IMCSI_NUMBA", "1").strip().lower() not in (
        "0",
        "false",
        "off",
        "no",
    )


def fill_u64_numpy(key: int, counter: int, n: int) -> np.ndarray:
    """SplitMix64 outputs for counters ``counter+1 .. counter+n`` under ``key``."""
    idx = np.arange(1, n + 1, dtype=np.uint64) + np.uint64(counter)
    z = np.uint64(key) + idx * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def accumulate_paths_numpy(coeff: np.ndarray, a_rx: np.ndarray, a_tx_conj: np.ndarray) -> np.ndarray:
    """Sum of per-path rank-1 terms: out[rb] = sum_p coeff[rb,p] * outer(a_rx[p], a_tx_conj[p]).

    coeff: (n_rb, n_paths) complex, a_rx: (n_paths, nr), a_tx_conj: (n_paths, nt).
    """
    return np.einsum("rp,pi,pj->rij", coeff, a_rx, a_tx_conj, optimize=True)


_HAVE_NUMBA = False
if _numba_requested():
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def fill_u64_jit(key, counter, n):  # pragma: no cover - exercised via dispatch
        out = np.empty(n, dtype=np.uint64)
        k = np.uint64(key)
        c = np.uint64(counter)
        one = np.uint64(1)
        for i in range(n):
            z = k + (c + np.uint64(i) + one) * _GAMMA
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            out[i] = z ^ (z >> np.uint64(31))
        return out

    @njit(cache=True)
    def accumulate_paths_jit(coeff, a_rx, a_tx_conj):  # pragma: no cover
        n_rb, n_paths = coeff.shape
        nr = a_rx.shape[1]
        nt = a_tx_conj.shape[1]
        out = np.zeros((n_rb, nr, nt), dtype=np.complex128)
        for rb in range(n_rb):
            for p in range(n_paths):
                c = coeff[rb, p]
                for i in range(nr):
                    ci = c * a_rx[p, i]
                    for j in range(nt):
                        out[rb, i, j] += ci * a_tx_conj[p, j]
        return out

    fill_u64 = fill_u64_jit
    accumulate_paths = accumulate_paths_jit
    USING_NUMBA = True
else:
    fill_u64 = fill_u64_numpy
    accumulate_paths = accumulate_paths_numpy
    USING_NUMBA = False
