import math
from collections import Counter
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freegame import invbasis as ib
from freegame import symcomb as sc
from freegame.blockreduce import polytabloid_dense

# Orbit classes for n = d = 2 as 1-based (row, col) positions of a 4x4 matrix.
ORBITS_N2_D2 = [
    {(1, 1)}, {(4, 4)}, {(2, 2), (3, 3)}, {(1, 2), (1, 3)}, {(2, 1), (3, 1)},
    {(1, 4)}, {(4, 1)}, {(2, 3), (3, 2)}, {(2, 4), (3, 4)}, {(4, 2), (4, 3)},
]


def fixture_matrix(cells):
    M = np.zeros((4, 4), dtype=np.int64)
    for r, c in cells:
        M[r - 1, c - 1] = 1
    return M


def test_full_basis_matches_printed_orbits():
    reps = sc.orbit_representatives(2, 2)
    dense = [ib.InvariantBasisElement(D, 2, 2).dense() for D in reps]
    printed = [fixture_matrix(c) for c in ORBITS_N2_D2]
    assert len(dense) == 10
    for M in printed:
        assert sum(np.array_equal(M, X) for X in dense) == 1
    assert np.array_equal(sum(dense), np.ones((4, 4), dtype=np.int64))


def test_bose_fixture():
    C = ib.InvariantBasisElement.bose((1, 1), (1, 1)).dense()
    assert np.array_equal(C, fixture_matrix({(2, 2), (2, 3), (3, 2), (3, 3)}))
    u = polytabloid_dense(sc.Tableau(sc.Partition((2,)), ((1, 2),)), 2).astype(np.int64)
    assert int(u @ C @ u) == 4
    assert ib.trace_bose((1, 1), (1, 1), 2) == 2
    assert ib.trace_bose((2, 1), (2, 1), 3) == 3
    assert ib.trace_bose((2, 1), (1, 2)) == 0


def test_first_copy_split_of_orbit():
    # orbit of (000, 001): first-copy pair (0, 0) has 2 members and (0, 1) has 1
    D = sc.freq_matrix((0, 0, 0), (0, 0, 1), 2)
    split = Counter((a[0], b[0]) for a, b in ib.orbit_pairs(D))
    assert split == {(0, 0): 2, (0, 1): 1}
    row = ib.InvariantBasisElement(D, 2, 3).dense()[0]
    assert row.tolist() == [0, 1, 1, 0, 1, 0, 0, 0]


def test_ptrace_tail_examples():
    assert ib.ptrace_tail_bose((1, 1), (2, 0)) == [(1, (1, 0))]
    assert sorted(ib.ptrace_tail_bose((1, 1), (1, 1))) == [(1, (0, 0)), (1, (1, 1))]
    assert ib.ptrace_tail_bose((2, 0), (0, 2)) == []
    assert ib.ptrace_tail_full(((1, 0), (0, 1))) == [(1, (0, 0)), (1, (1, 1))]


def dense_ptrace_tail(M, n, d):
    return ib.ptrace(M, [d, d ** (n - 1)], [0])


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_ptrace_tail_against_dense(n, d):
    for t in sc.types(n, d):
        for tp in sc.types(n, d):
            C = ib.InvariantBasisElement.bose(t, tp).dense().astype(float)
            want = dense_ptrace_tail(C, n, d)
            got = np.zeros((d, d))
            for coef, (w, z) in ib.ptrace_tail_bose(t, tp):
                got[w, z] += coef
            assert np.array_equal(got, want)
    for D in sc.orbit_representatives(n, d):
        A = ib.InvariantBasisElement(D, d, n).dense().astype(float)
        got = np.zeros((d, d))
        for coef, (w, z) in ib.ptrace_tail_full(D):
            got[w, z] += coef
        assert np.array_equal(got, dense_ptrace_tail(A, n, d))
        assert ib.trace_full(D) == int(np.trace(A))


def test_branch_full_against_dense():
    n, dL, dR = 2, 2, 2
    d = dL * dR
    for D in sc.orbit_representatives(n, d):
        A = ib.InvariantBasisElement(D, d, n).dense().astype(float)
        want = ib.ptrace(A, [d ** (n - 1), dL, dR], [0, 2])
        got = np.zeros_like(want)
        for Dp, (r, rp), mult in ib.branch_full(D, dL, dR):
            unit = np.zeros((dR, dR))
            unit[r, rp] = 1
            got += mult * np.kron(ib.InvariantBasisElement(Dp, d, n - 1).dense(), unit)
        assert np.array_equal(got, want)


def test_split_first_copy_counts():
    for t in sc.types(3, 2):
        for tp in sc.types(3, 2):
            C = ib.InvariantBasisElement.bose(t, tp).dense().reshape(2, 4, 2, 4)
            for (w, z), _, _, count in ib.split_first_copy(t, tp):
                assert int(C[w, :, z, :].sum()) == count


def test_symmetric_projector_coefficients():
    n, d = 2, 2
    dim = d ** n
    P = sum(ib.permutation_matrix(p, d) for p in permutations(range(n))) / math.factorial(n)
    calls = []

    def entry(i, j):
        calls.append((i, j))
        return P[i, j]

    coeffs = ib.coefficients_bose(entry, n, d)
    assert len(calls) == math.comb(n + d - 1, n) ** 2
    for (t, tp), v in coeffs.items():
        want = 1 / sc.multinomial(n, t) if t == tp else 0.0
        assert v == pytest.approx(want, abs=1e-15)
    assert np.allclose(ib.dense_from_bose(coeffs, n, d), P)
    assert dim == 4


def random_bose_operator(rng, n, d):
    tys = sc.types(n, d)
    return {(t, tp): float(rng.normal()) for t in tys for tp in tys}


@given(st.sampled_from([(1, 2), (2, 2), (3, 2), (2, 3), (4, 2), (3, 3), (2, 4), (4, 3), (8, 2), (4, 4)]),
       st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_bose_coefficients_roundtrip(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    coeffs = random_bose_operator(rng, n, d)
    M = ib.dense_from_bose(coeffs, n, d)
    calls = []

    def entry(i, j):
        calls.append(1)
        return M[i, j]

    back = ib.coefficients_bose(entry, n, d)
    assert len(calls) == math.comb(n + d - 1, n) ** 2
    assert back == coeffs


@given(st.sampled_from([(2, 2), (3, 2), (2, 3)]), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=15, deadline=None)
def test_full_coefficients_roundtrip(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    coeffs = {D: float(rng.normal()) for D in sc.orbit_representatives(n, d)}
    M = ib.dense_from_full(coeffs, n, d)
    for p in permutations(range(n)):
        P = ib.permutation_matrix(p, d)
        assert np.allclose(P @ M @ P.T, M, atol=0)
    assert ib.coefficients_full(lambda i, j: M[i, j], n, d) == coeffs


def test_dense_cap():
    with pytest.raises(ib.DenseCapExceeded):
        ib.orbit_labels(6, 4, cap=100)


def test_permutation_matrix_moves_copies():
    P = ib.permutation_matrix((1, 2, 0), 2)
    e = np.zeros(8)
    e[ib.string_index((1, 0, 0), 2)] = 1
    assert (P @ e)[ib.string_index((0, 1, 0), 2)] == 1
