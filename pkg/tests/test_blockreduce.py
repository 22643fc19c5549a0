from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freegame import blockreduce as br
from freegame import symcomb as sc
from freegame.invbasis import dense_from_bose, dense_from_full, orbit_labels


def test_polytabloid_antisymmetric_pair():
    tau = sc.Tableau(sc.Partition((1, 1)), ((1,), (2,)))
    assert br.polytabloid(tau) == {(0, 1): 1, (1, 0): -1}
    with pytest.raises(ValueError):
        br.polytabloid(sc.Tableau(sc.Partition((1, 1)), ((1,), (1,))))


def test_row_transform_indicator():
    out = br.block_transform_row({((1, 1), (1, 1)): 1}, 2, 2)
    assert out[1, 1] == 4
    assert np.count_nonzero(out) == 1


def test_row_transform_symmetric_projector():
    coeffs = {(t, t): 1 / sc.multinomial(2, t) for t in sc.types(2, 2)}
    assert np.allclose(br.block_transform_row(coeffs, 2, 2), np.diag([1.0, 2.0, 1.0]))


def test_antisymmetric_block_of_orbit():
    D = ((1, 0), (0, 1))
    shape = sc.Partition((1, 1))
    assert br.block_transform_general({D: 1}, shape, 2)[0, 0] == 2
    Z = dense_from_full({D: 1.0}, 2, 2)
    assert br.dense_transform(Z, shape, 2)[0, 0] == 2


def test_block_sizes():
    assert br.block_sizes(3, 2) == {sc.Partition((3,)): 4, sc.Partition((2, 1)): 2}
    assert br.block_sizes(2, 3, side=2) == {sc.Partition((2,)): 12, sc.Partition((1, 1)): 6}


def random_full(rng, n, d, exact=False):
    out = {}
    for D in sc.orbit_representatives(n, d):
        if D in out:
            continue
        v = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))) if exact else float(rng.normal())
        out[D] = v
        out[sc.transpose(D)] = v
    return out


def dense_exact(coeffs, n, d):
    labels, reps = orbit_labels(n, d)
    vals = np.empty(len(reps), dtype=object)
    for k, D in enumerate(reps):
        vals[k] = coeffs[D]
    return vals[labels]


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_transforms_exact_small(n, d):
    rng = np.random.default_rng(n * 10 + d)
    for _ in range(5):
        coeffs = random_full(rng, n, d, exact=True)
        Z = dense_exact(coeffs, n, d)
        for lam in sc.partitions(n, d):
            want = br.dense_transform(Z, lam, d, exact=True)
            assert (br.block_transform_general(coeffs, lam, d, exact=True) == want).all()
            assert (br.block_transform_sparse(coeffs, lam, d, exact=True) == want).all()


def test_row_transform_matches_dense_on_bose_operators():
    rng = np.random.default_rng(3)
    for n, d in [(2, 2), (3, 2), (2, 3), (4, 2)]:
        tys = sc.types(n, d)
        coeffs = {(t, tp): float(rng.normal()) for t in tys for tp in tys}
        Z = dense_from_bose(coeffs, n, d)
        want = br.dense_transform(Z, sc.Partition((n,)), d)
        assert np.allclose(br.block_transform_row(coeffs, n, d), want, atol=1e-12, rtol=0)


def test_side_factor_transform():
    rng = np.random.default_rng(5)
    n, d, side = 2, 2, 2
    reps = sc.orbit_representatives(n, d)
    coeffs = {(i, j, D): float(rng.normal()) for i in range(side) for j in range(side) for D in reps}
    Z = np.zeros((side * d ** n,) * 2)
    m = d ** n
    for i in range(side):
        for j in range(side):
            Z[i * m:(i + 1) * m, j * m:(j + 1) * m] = dense_from_full(
                {D: coeffs[(i, j, D)] for D in reps}, n, d)
    for lam in sc.partitions(n, d):
        want = br.dense_transform(Z, lam, d, side=side)
        assert np.allclose(br.block_transform_general(coeffs, lam, d, side=side), want, atol=1e-12, rtol=0)
        assert np.allclose(br.block_transform_sparse(coeffs, lam, d, side=side), want, atol=1e-12, rtol=0)


@given(st.sampled_from([(2, 2), (3, 2), (2, 3)]), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_twirled_gram_blocks_are_psd(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(d ** n, d ** n))
    labels, reps = orbit_labels(n, d)
    M = B @ B.T
    # average over each orbit gives the S_n twirl of a PSD matrix
    sums = np.bincount(labels.ravel(), weights=M.ravel(), minlength=len(reps))
    counts = np.bincount(labels.ravel(), minlength=len(reps))
    Z = (sums / counts)[labels]
    assert np.linalg.eigvalsh(Z)[0] > -1e-9
    for lam, blk in br.all_blocks(Z, n, d).items():
        assert np.linalg.eigvalsh(blk)[0] > -1e-9 * max(1.0, np.abs(blk).max())


def test_representative_matrix_rank():
    for n, d in [(3, 2), (2, 3), (4, 2)]:
        total = 0
        for lam in sc.partitions(n, d):
            U = br.representative_matrix(lam, d)
            assert np.linalg.matrix_rank(U) == sc.schur_dim(lam, d)
            total += sc.schur_dim(lam, d) * sc.specht_dim(lam)
        assert total == d ** n
