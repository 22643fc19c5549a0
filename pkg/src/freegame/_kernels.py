"""Inner loops with a numba build and a pure-numpy fallback.

Set ``FREEGAME_NUMBA=0`` to force the numpy versions (useful for debugging or
when numba is unavailable). Both versions return identical results.
"""

from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("FREEGAME_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}

try:
    if not _WANT_NUMBA:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


def svec_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of the upper triangle in svec order (row-major)."""
    return np.triu_indices(n)


def skron_numpy(W: np.ndarray) -> np.ndarray:
    """Matrix of ``E -> W E W`` in scaled svec coordinates."""
    n = W.shape[0]
    I, J = svec_indices(n)
    r = np.where(I == J, 1.0, np.sqrt(2.0))
    c = np.where(I == J, 1.0, 1.0 / np.sqrt(2.0)) / np.where(I == J, 2.0, 1.0)
    K = W[I[:, None], I[None, :]] * W[J[:, None], J[None, :]]
    K += W[I[:, None], J[None, :]] * W[J[:, None], I[None, :]]
    K *= r[:, None]
    K *= c[None, :]
    return K


def pair_counts_numpy(rows: np.ndarray, cols: np.ndarray, n: int, d: int) -> np.ndarray:
    """Frequency matrices (flattened, ``d*d`` columns) of index pairs in ``(C^d)^n``."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    out = np.zeros((rows.size, d * d), dtype=np.int32)
    ar, ac = rows.copy(), cols.copy()
    idx = np.arange(rows.size)
    for _ in range(n):
        np.add.at(out, (idx, (ar % d) * d + (ac % d)), 1)
        ar //= d
        ac //= d
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _skron_nb(W):
        n = W.shape[0]
        m = n * (n + 1) // 2
        I = np.empty(m, dtype=np.int64)
        J = np.empty(m, dtype=np.int64)
        k = 0
        for i in range(n):
            for j in range(i, n):
                I[k] = i
                J[k] = j
                k += 1
        s2 = np.sqrt(2.0)
        K = np.empty((m, m))
        for p in range(m):
            i = I[p]
            j = J[p]
            rp = 1.0 if i == j else s2
            for q in range(m):
                k2 = I[q]
                l2 = J[q]
                v = W[i, k2] * W[j, l2] + W[i, l2] * W[j, k2]
                if k2 == l2:
                    K[p, q] = rp * v * 0.5
                else:
                    K[p, q] = rp * v / s2
        return K

    @njit(cache=True)
    def _pair_counts_nb(rows, cols, n, d):
        out = np.zeros((rows.size, d * d), dtype=np.int32)
        for t in range(rows.size):
            a = rows[t]
            b = cols[t]
            for _ in range(n):
                out[t, (a % d) * d + (b % d)] += 1
                a //= d
                b //= d
        return out

    def skron(W: np.ndarray) -> np.ndarray:
        return _skron_nb(np.ascontiguousarray(W, dtype=np.float64))

    def pair_counts(rows: np.ndarray, cols: np.ndarray, n: int, d: int) -> np.ndarray:
        return _pair_counts_nb(np.ascontiguousarray(rows, dtype=np.int64),
                               np.ascontiguousarray(cols, dtype=np.int64), n, d)

else:  # pragma: no cover
    skron = skron_numpy
    pair_counts = pair_counts_numpy


BACKEND = "numba" if HAVE_NUMBA else "numpy"
