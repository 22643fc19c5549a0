import os
import subprocess
import sys

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from freegame import _kernels as k
from freegame.sdpsolve import smat, svec
from freegame.symcomb import freq_matrix


def test_skron_is_congruence_in_svec_coordinates():
    rng = np.random.default_rng(0)
    W = rng.normal(size=(5, 5))
    W = W + W.T
    E = rng.normal(size=(5, 5))
    E = E + E.T
    assert np.allclose(k.skron_numpy(W) @ svec(E), svec(W @ E @ W), atol=1e-12)
    assert np.allclose(smat(svec(E), 5), E)


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_skron_backends_agree(side, seed):
    W = np.random.default_rng(seed).normal(size=(side, side))
    W = W @ W.T
    assert np.allclose(k.skron(W), k.skron_numpy(W), atol=1e-12, rtol=0)


@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_pair_counts_backends_agree(n, d, seed):
    rng = np.random.default_rng(seed)
    dim = d ** n
    rows = rng.integers(0, dim, size=50)
    cols = rng.integers(0, dim, size=50)
    a = k.pair_counts(rows, cols, n, d)
    assert np.array_equal(a, k.pair_counts_numpy(rows, cols, n, d))
    for r, c, got in zip(rows, cols, a):
        ra = np.unravel_index(r, (d,) * n) if n else ()
        ca = np.unravel_index(c, (d,) * n) if n else ()
        D = freq_matrix([int(x) for x in ra], [int(x) for x in ca], d)
        assert got.tolist() == [v for row in D for v in row]


def backend_with(flag: str) -> str:
    env = dict(os.environ, FREEGAME_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from freegame import _kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_flag_selects_numpy():
    assert backend_with("0") == "numpy"
    assert backend_with("off") == "numpy"


def test_env_flag_default_uses_numba_when_installed():
    try:
        import numba  # noqa: F401
    except ImportError:
        assert backend_with("1") == "numpy"
    else:
        assert backend_with("1") == "numba"


def test_numpy_backend_solves_the_same_sdp():
    code = ("from freegame.csep import synthetic_csep;"
            "from freegame.hierarchy import build_sym_reduced_csep_sdp;"
            "from freegame.sdpsolve import solve;"
            "print(repr(solve(build_sym_reduced_csep_sdp(synthetic_csep('antisymmetric'), 3)).primalValue))")
    vals = []
    for flag in ("0", "1"):
        env = dict(os.environ, FREEGAME_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.append(float(out.stdout))
    assert abs(vals[0] - vals[1]) < 1e-10
    assert abs(vals[0] - 2 / 3) < 1e-6
