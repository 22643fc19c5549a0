"""Embedded interior-point solver and SDPA sparse export/import.

``solve`` handles problems in the :class:`SDPProblem` form. Before the
interior-point kernel runs, the problem is presolved:

1. blocks are split into connected components of their sparsity pattern;
2. equalities of the form ``c_a x_a + c_b x_b = 0`` are eliminated by a
   weighted union-find, and the remaining rows are reduced to an independent
   set by pivoted QR (threshold 1e-10); inconsistent rows mean infeasible;
3. every block is restricted to the joint range of its coefficient matrices
   (without this step problems whose variable is confined to a subspace, such as
   Bose-symmetric states, have no interior point);
4. if the block map is square and invertible the problem is solved in primal
   form over the blocks, otherwise the equalities are eliminated through a
   nullspace basis and the problem is solved in dual form.

The kernel is a primal-dual path-following method with Nesterov-Todd scaling
and Mehrotra predictor-corrector steps, in scaled svec coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from ._kernels import skron
from .sdpproblem import PSDBlock, SDPProblem

BLOCK_CAP = 2000
SQRT2 = math.sqrt(2.0)


class SolverCapExceeded(ValueError):
    pass


class MalformedProblem(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    status: str  # "optimal" | "infeasible" | "numerical-limit"
    primalValue: float
    dualValue: float
    x: np.ndarray
    primalBlocks: list
    dualMultipliers: np.ndarray
    gap: float
    iterations: int
    residual: float = 0.0
    minEigenvalue: float = 0.0
    route: str = ""
    history: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.primalValue


# ---------------------------------------------------------------- svec helpers


def svec(X: np.ndarray) -> np.ndarray:
    I, J = np.triu_indices(X.shape[0])
    return np.where(I == J, 1.0, SQRT2) * X[I, J]


def smat(v: np.ndarray, n: int) -> np.ndarray:
    I, J = np.triu_indices(n)
    X = np.zeros((n, n))
    X[I, J] = v * np.where(I == J, 1.0, 1.0 / SQRT2)
    X[J, I] = X[I, J]
    return X


def _svec_dim(n: int) -> int:
    return n * (n + 1) // 2


# ---------------------------------------------------------------- kernel


@dataclass
class _KernelResult:
    X: list
    y: np.ndarray
    Z: list
    status: str
    iterations: int
    pobj: float
    dobj: float
    pinf: float
    dinf: float
    history: list


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    L = np.linalg.cholesky(X)
    Li = sla.solve_triangular(L, np.eye(X.shape[0]), lower=True)
    ev = np.linalg.eigvalsh(Li @ dX @ Li.T)
    lo = ev[0]
    return math.inf if lo >= 0 else -1.0 / lo


def ipm_kernel(sizes: list[int], A: list[np.ndarray], b: np.ndarray, C: list[np.ndarray],
               tol: float = 1e-8, max_iter: int = 200, step: float = 0.98) -> _KernelResult:
    """Solve ``min <C, X>  s.t.  <A_i, X> = b_i, X >= 0`` and its dual
    ``max b^T y  s.t.  C - sum y_i A_i >= 0``; everything in svec form."""
    p = b.size
    nb = len(sizes)
    # row scaling
    norms = np.sqrt(sum((Ak ** 2).sum(axis=1) for Ak in A)) if p else np.zeros(0)
    norms = np.where(norms > 0, norms, 1.0)
    A = [Ak / norms[:, None] for Ak in A]
    b = b / norms
    ntot = sum(sizes)
    normb = np.linalg.norm(b)
    normC = math.sqrt(sum(float(c @ c) for c in C))

    X, Z = [], []
    for k, n in enumerate(sizes):
        normA_k = np.sqrt((A[k] ** 2).sum(axis=1)) if p else np.zeros(0)
        xi = max(10.0, math.sqrt(n), n * float(np.max((1 + np.abs(b)) / (1 + normA_k))) if p else 10.0)
        eta = max(10.0, math.sqrt(n), (1 + max(float(np.max(normA_k)) if p else 0.0, float(np.linalg.norm(C[k])))) / math.sqrt(n))
        X.append(xi * np.eye(n))
        Z.append(eta * np.eye(n))
    y = np.zeros(p)
    history: list = []
    status = "numerical-limit"
    pobj = dobj = pinf = dinf = math.nan
    it = 0
    best = None
    for it in range(max_iter + 1):
        xs = [svec(Xk) for Xk in X]
        zs = [svec(Zk) for Zk in Z]
        AX = sum(A[k] @ xs[k] for k in range(nb)) if p else np.zeros(0)
        rp = b - AX
        Rd = [C[k] - zs[k] - (A[k].T @ y if p else 0.0) for k in range(nb)]
        pobj = float(sum(C[k] @ xs[k] for k in range(nb)))
        dobj = float(b @ y)
        mu = float(sum(xs[k] @ zs[k] for k in range(nb))) / ntot
        pinf = float(np.linalg.norm(rp)) / (1 + normb)
        dinf = math.sqrt(sum(float(r @ r) for r in Rd)) / (1 + normC)
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        history.append((pobj, dobj, pinf, dinf, relgap))
        score = max(pinf, dinf, relgap)
        if best is None or score < best[0]:
            best = (score, [x.copy() for x in X], y.copy(), [z.copy() for z in Z], pobj, dobj, pinf, dinf)
        if score <= tol:
            status = "optimal"
            break
        if max(abs(pobj), abs(dobj)) > 1e12 or (it > 20 and (np.max([np.abs(x).max() for x in X]) > 1e14 or np.max([np.abs(z).max() for z in Z]) > 1e14)):
            status = "infeasible"
            break
        if it == max_iter:
            break
        try:
            Ds, Dinvs, Ws, lams = [], [], [], []
            for k in range(nb):
                L = np.linalg.cholesky(X[k])
                R = np.linalg.cholesky(Z[k])
                U, s, Vt = np.linalg.svd(R.T @ L)
                Dk = L @ Vt.T / np.sqrt(s)[None, :]
                Dinv = (np.sqrt(s)[:, None] * Vt) @ sla.solve_triangular(L, np.eye(L.shape[0]), lower=True)
                Ds.append(Dk)
                Dinvs.append(Dinv)
                Ws.append(Dk @ Dk.T)
                lams.append(s)
            if p:
                M = np.zeros((p, p))
                for k in range(nb):
                    AK = A[k] @ skron(Ws[k])
                    M += AK @ A[k].T
                M = (M + M.T) / 2
                try:
                    cho = sla.cho_factor(M, lower=True, check_finite=False)
                    msolve = lambda r: sla.cho_solve(cho, r, check_finite=False)
                except np.linalg.LinAlgError:
                    reg = 1e-14 * max(1.0, float(np.trace(M)) / p)
                    lu = sla.lu_factor(M + reg * np.eye(p))
                    msolve = lambda r: sla.lu_solve(lu, r)
            Rdm = [smat(Rd[k], sizes[k]) for k in range(nb)]
            WRW = [Ws[k] @ Rdm[k] @ Ws[k] for k in range(nb)]

            def direction(Rt):
                H = [Ds[k] @ Rt[k] @ Ds[k].T for k in range(nb)]
                if p:
                    rhs = rp - sum(A[k] @ svec(H[k] - WRW[k]) for k in range(nb))
                    dy = msolve(rhs)
                else:
                    dy = np.zeros(0)
                dZ = [Rdm[k] - (smat(A[k].T @ dy, sizes[k]) if p else 0.0) for k in range(nb)]
                dX = [H[k] - Ws[k] @ dZ[k] @ Ws[k] for k in range(nb)]
                dX = [(d + d.T) / 2 for d in dX]
                dZ = [(d + d.T) / 2 for d in dZ]
                return dX, dy, dZ

            dXa, dya, dZa = direction([-np.diag(l) for l in lams])
            ap = min(1.0, min(_max_step(X[k], dXa[k]) for k in range(nb)))
            ad = min(1.0, min(_max_step(Z[k], dZa[k]) for k in range(nb)))
            mu_aff = sum(float(np.sum((X[k] + ap * dXa[k]) * (Z[k] + ad * dZa[k]))) for k in range(nb)) / ntot
            sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
            Rt = []
            for k in range(nb):
                l = lams[k]
                dXt = Dinvs[k] @ dXa[k] @ Dinvs[k].T
                dZt = Ds[k].T @ dZa[k] @ Ds[k]
                rhs = sigma * mu * np.eye(sizes[k]) - np.diag(l ** 2) - (dXt @ dZt + dZt @ dXt) / 2
                Rt.append(2 * rhs / (l[:, None] + l[None, :]))
            dX, dy, dZ = direction(Rt)
            ap = min(1.0, step * min(_max_step(X[k], dX[k]) for k in range(nb)))
            ad = min(1.0, step * min(_max_step(Z[k], dZ[k]) for k in range(nb)))
        except np.linalg.LinAlgError:
            break
        if ap < 1e-12 and ad < 1e-12:
            break
        X = [X[k] + ap * dX[k] for k in range(nb)]
        Z = [Z[k] + ad * dZ[k] for k in range(nb)]
        y = y + ad * dy
    if status != "optimal" and best is not None:
        _, X, y, Z, pobj, dobj, pinf, dinf = best
    return _KernelResult(X, y / norms if p else y, Z, status, it, pobj, dobj, pinf, dinf, history)


# ---------------------------------------------------------------- presolve


class _Infeasible(Exception):
    pass


def _eliminate_pairs(A: sp.csr_matrix, b: np.ndarray, n: int) -> tuple[sp.csr_matrix, np.ndarray]:
    """Return ``T`` (n x m) with ``x = T u`` and the mask of rows that remain."""
    parent = list(range(n))
    ratio = [1.0] * n
    zero = [False] * n

    def find(v: int) -> tuple[int, float]:
        f = 1.0
        path = []
        while parent[v] != v:
            path.append(v)
            f *= ratio[v]
            v = parent[v]
        root = v
        # path compression
        acc = f
        for u in path:
            old = ratio[u]
            ratio[u] = acc
            parent[u] = root
            acc /= old
        return root, f

    keep = np.ones(A.shape[0], dtype=bool)
    for r in range(A.shape[0]):
        if b[r] != 0.0:
            continue
        lo, hi = A.indptr[r], A.indptr[r + 1]
        cols, vals = A.indices[lo:hi], A.data[lo:hi]
        nzm = vals != 0
        cols, vals = cols[nzm], vals[nzm]
        if len(cols) == 1:
            root, _ = find(int(cols[0]))
            zero[root] = True
            keep[r] = False
        elif len(cols) == 2:
            a, c = int(cols[0]), int(cols[1])
            ra, fa = find(a)
            rc, fc = find(c)
            coef = -vals[1] / vals[0]  # x_a = coef * x_c
            if ra == rc:
                if abs(fa - coef * fc) > 1e-12 * max(1.0, abs(fa)):
                    zero[ra] = True
            else:
                parent[ra] = rc
                ratio[ra] = coef * fc / fa
                zero[rc] = zero[rc] or zero[ra]
            keep[r] = False
    roots = {}
    rows, cols, vals = [], [], []
    for v in range(n):
        root, f = find(v)
        if zero[root]:
            continue
        k = roots.setdefault(root, len(roots))
        rows.append(v)
        cols.append(k)
        vals.append(f)
    T = sp.csr_matrix((vals, (rows, cols)), shape=(n, len(roots)))
    return T, keep


def _independent_rows(A: sp.csr_matrix, b: np.ndarray, thresh: float = 1e-10) -> np.ndarray:
    """Indices of an independent subset of rows; raises ``_Infeasible`` on conflicts."""
    m, n = A.shape
    if m == 0:
        return np.zeros(0, dtype=int)
    graph = sp.bmat([[None, abs(A)], [abs(A).T, None]]).tocsr()
    ncomp, labels = connected_components(graph, directed=False)
    row_lab = labels[:m]
    col_lab = labels[m:]
    keep = []
    for comp in np.unique(row_lab):
        ridx = np.flatnonzero(row_lab == comp)
        cidx = np.flatnonzero(col_lab == comp)
        sub = A[ridx][:, cidx].toarray()
        if sub.size == 0 or not np.any(sub):
            if np.any(np.abs(b[ridx]) > 1e-9):
                raise _Infeasible("zero row with nonzero rhs")
            continue
        Q, R, piv = sla.qr(sub.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > thresh * diag[0])) if diag.size else 0
        chosen = ridx[np.sort(piv[:rank])]
        # consistency of the discarded rows
        xs = np.linalg.lstsq(sub[np.sort(piv[:rank])], b[chosen], rcond=None)[0]
        res = sub @ xs - b[ridx]
        if np.max(np.abs(res)) > 1e-8 * (1 + np.max(np.abs(b[ridx]))):
            raise _Infeasible("inconsistent equality constraints")
        keep.extend(chosen.tolist())
    return np.array(sorted(keep), dtype=int)


@dataclass
class _SubBlock:
    block: int
    idx: np.ndarray  # indices into the original block
    Q: np.ndarray | None  # range basis when reduced
    F: sp.csc_matrix  # svec rows x vars
    f0: np.ndarray

    @property
    def size(self) -> int:
        return self.Q.shape[1] if self.Q is not None else self.idx.size


def _split_block(k: int, blk: PSDBlock, T: sp.csr_matrix) -> list[_SubBlock]:
    side = blk.side
    F = (blk.coeffs @ T).tocsr()
    I, J = np.triu_indices(side)
    rows_nz = np.flatnonzero(np.diff(F.indptr) > 0)
    const = blk.constant
    ci, cj = np.nonzero(np.triu(const))
    ei = np.concatenate([I[rows_nz], ci])
    ej = np.concatenate([J[rows_nz], cj])
    adj = sp.coo_matrix((np.ones(ei.size), (ei, ej)), shape=(side, side))
    ncomp, labels = connected_components(adj + adj.T, directed=False)
    diag_used = np.zeros(side, dtype=bool)
    diag_used[ei[ei == ej]] = True
    diag_used[ei] |= False
    touched = np.zeros(side, dtype=bool)
    touched[ei] = True
    touched[ej] = True
    out = []
    pos_of = {}
    for comp in range(ncomp):
        idx = np.flatnonzero(labels == comp)
        if not touched[idx].any():
            continue
        s = idx.size
        loc = {int(g): l for l, g in enumerate(idx)}
        # rows of the local svec
        li, lj = np.triu_indices(s)
        gi, gj = idx[li], idx[lj]
        grow = gi * side - gi * (gi - 1) // 2 + (gj - gi)
        scale = np.where(li == lj, 1.0, SQRT2)
        Fl = sp.diags(scale) @ F[grow]
        f0 = scale * const[gi, gj]
        out.append(_SubBlock(k, idx, None, sp.csc_matrix(Fl), f0))
    return out


def _reduce_range(sb: _SubBlock, thresh: float = 1e-9) -> _SubBlock:
    s = sb.idx.size
    if s == 1:
        return sb
    li, lj = np.triu_indices(s)
    coo = sb.F.tocoo()
    r, c, v = li[coo.row], lj[coo.row], coo.data
    v = np.where(r == c, v, v / SQRT2)
    m = sb.F.shape[1]
    # stacked [M_1 ... M_m F0]
    rows = np.concatenate([r, c[r != c]])
    cols = np.concatenate([coo.col * s + c, (coo.col * s + r)[r != c]])
    vals = np.concatenate([v, v[r != c]])
    F0 = smat(sb.f0, s)
    f0r, f0c = np.nonzero(F0)
    rows = np.concatenate([rows, f0r])
    cols = np.concatenate([cols, m * s + f0c])
    vals = np.concatenate([vals, F0[f0r, f0c]])
    H = sp.csr_matrix((vals, (rows, cols)), shape=(s, (m + 1) * s))
    G = (H @ H.T).toarray()
    ev, U = np.linalg.eigh(G)
    if ev[-1] <= 0:
        return sb
    keep = ev > thresh * ev[-1]
    if keep.all():
        return sb
    Q = U[:, keep]
    q = Q.shape[1]
    qi, qj = np.triu_indices(q)
    qscale = np.where(qi == qj, 1.0, SQRT2)
    newF = np.zeros((q * (q + 1) // 2, m))
    Fc = sb.F.tocsc()
    for var in range(m):
        lo, hi = Fc.indptr[var], Fc.indptr[var + 1]
        if lo == hi:
            continue
        Mv = smat(np.asarray(Fc[:, var].toarray()).ravel(), s)
        R = Q.T @ Mv @ Q
        newF[:, var] = qscale * R[qi, qj]
    R0 = Q.T @ F0 @ Q
    newF[np.abs(newF) < 1e-15] = 0.0
    return _SubBlock(sb.block, sb.idx, Q, sp.csc_matrix(newF), qscale * R0[qi, qj])


# ---------------------------------------------------------------- solve


def solve(p: SDPProblem, tol: float = 1e-8, max_iter: int = 200, block_cap: int = BLOCK_CAP) -> Solution:
    """Maximize ``p.objective @ x`` subject to the blocks and equalities of ``p``."""
    if tol < 1e-10:
        raise ValueError("tol must be at least 1e-10")
    for blk in p.psd_blocks:
        if blk.side > block_cap:
            raise SolverCapExceeded(f"block of side {blk.side} exceeds the cap {block_cap}; export with export_sdpa")
    n = p.num_vars
    A = p.eq_matrix.tocsr()
    b = p.eq_rhs.copy()

    def infeasible(msg: str) -> Solution:
        return Solution("infeasible", math.nan, math.nan, np.full(n, math.nan), [], np.zeros(A.shape[0]),
                        math.inf, 0, route=msg)

    T, keep_rows = _eliminate_pairs(A, b, n)
    A2 = (A[keep_rows] @ T).tocsr()
    b2 = b[keep_rows]
    A2.eliminate_zeros()
    zero_rows = np.diff(A2.indptr) == 0
    if np.any(np.abs(b2[zero_rows]) > 1e-9):
        return infeasible("presolve: empty row with nonzero rhs")
    A2, b2 = A2[~zero_rows], b2[~zero_rows]
    try:
        rows = _independent_rows(A2, b2)
    except _Infeasible as exc:
        return infeasible(f"presolve: {exc}")
    A2, b2 = A2[rows], b2[rows]
    c2 = T.T @ p.objective
    m = T.shape[1]

    subs: list[_SubBlock] = []
    for k, blk in enumerate(p.psd_blocks):
        for sb in _split_block(k, blk, T):
            subs.append(_reduce_range(sb))
    sizes = [sb.size for sb in subs]
    Bmat = sp.vstack([sb.F for sb in subs]).tocsc() if subs else sp.csc_matrix((0, m))
    f0 = np.concatenate([sb.f0 for sb in subs]) if subs else np.zeros(0)
    offsets = np.cumsum([0] + [_svec_dim(s) for s in sizes])

    route = "dual"
    lu = None
    if Bmat.shape[0] == m and m > 0:
        try:
            lu = spla.splu(Bmat, permc_spec="COLAMD")
            udiag = np.abs(lu.U.diagonal())
            if udiag.min() <= 1e-11 * udiag.max():
                lu = None
        except RuntimeError:
            lu = None
        if lu is not None:
            route = "primal"
    const = p.objective_constant

    if route == "primal":
        Ad = A2.toarray()
        AB = lu.solve(Ad.T.copy(), trans="T").T if Ad.size else np.zeros((0, m))
        bX = b2 - (AB @ f0 if Ad.size else 0.0)
        CX = -lu.solve(c2.copy(), trans="T")
        const_X = const - float(c2 @ lu.solve(f0.copy()))
        Ablocks = [AB[:, offsets[i]:offsets[i + 1]] for i in range(len(subs))]
        Cblocks = [CX[offsets[i]:offsets[i + 1]] for i in range(len(subs))]
        kr = ipm_kernel(sizes, Ablocks, bX, Cblocks, tol, max_iter)
        s_all = np.concatenate([svec(X) for X in kr.X])
        u = lu.solve(s_all - f0)
        primal_bound = -kr.pobj + const_X
        dual_bound = -kr.dobj + const_X
        upper = max(primal_bound, dual_bound)
        mult = np.zeros(A.shape[0])
    else:
        Ad = A2.toarray()
        if Ad.shape[0]:
            u0 = np.linalg.lstsq(Ad, b2, rcond=None)[0]
            N = sla.null_space(Ad, rcond=1e-12)
        else:
            u0 = np.zeros(m)
            N = np.eye(m)
        BN = Bmat @ N
        Cfull = f0 + Bmat @ u0
        bY = N.T @ c2
        Ablocks = [-(BN[offsets[i]:offsets[i + 1]]).T for i in range(len(subs))]
        Cblocks = [Cfull[offsets[i]:offsets[i + 1]] for i in range(len(subs))]
        base = float(c2 @ u0) + const
        if N.shape[1] == 0:
            u = u0
            kr = _KernelResult([smat(c, s) for c, s in zip(Cblocks, sizes)], np.zeros(0), [], "optimal", 0,
                               0.0, 0.0, 0.0, 0.0, [])
            primal_bound = dual_bound = base
        else:
            kr = ipm_kernel(sizes, Ablocks, bY, Cblocks, tol, max_iter)
            u = u0 + N @ kr.y
            primal_bound = base + kr.dobj
            dual_bound = base + kr.pobj
        mult = np.zeros(A.shape[0])
        upper = max(primal_bound, dual_bound)

    x = T @ u
    blocks = [blk.evaluate(x) for blk in p.psd_blocks]
    min_eig = min((float(np.linalg.eigvalsh(B)[0]) for B in blocks), default=0.0)
    resid = p.residual(x)
    value = p.value(x)
    gap = abs(dual_bound - value)
    status = kr.status
    scale = 1.0 + abs(value)
    if status == "optimal" and (resid > 10 * tol * (1 + np.abs(p.eq_rhs).max(initial=0.0)) or min_eig < -10 * tol * scale):
        status = "numerical-limit"
    if status == "infeasible":
        value = math.nan
    return Solution(status, value, dual_bound, x, blocks, mult, gap, kr.iterations, resid, min_eig, route,
                    kr.history)


# ---------------------------------------------------------------- SDPA


def _to_sdpa_data(p: SDPProblem) -> tuple[list[int], np.ndarray, list[tuple[int, int, int, int, float]]]:
    """SDPA encodes ``max c^T x`` problems as ``min sum c_i x_i  s.t.  sum x_i F_i - F_0 >= 0``.

    Our form maps as: SDPA variables = problem variables, SDPA objective =
    ``-objective``, ``F_i`` = block coefficients, ``F_0 = -constant``. Each
    equality ``a^T x = b`` becomes a 1x1 diagonal pair ``a^T x - b >= 0`` and
    ``-a^T x + b >= 0`` packed in one diagonal block.
    """
    sizes = [blk.side for blk in p.psd_blocks]
    entries: list[tuple[int, int, int, int, float]] = []
    for bno, blk in enumerate(p.psd_blocks, start=1):
        I, J = np.triu_indices(blk.side)
        c0 = -blk.constant
        for i, j in zip(*np.nonzero(np.triu(c0))):
            entries.append((0, bno, int(i) + 1, int(j) + 1, float(c0[i, j])))
        coo = blk.coeffs.tocoo()
        for r, v, val in zip(coo.row, coo.col, coo.data):
            if val != 0:
                entries.append((int(v) + 1, bno, int(I[r]) + 1, int(J[r]) + 1, float(val)))
    m = p.eq_matrix.shape[0]
    if m:
        bno = len(sizes) + 1
        sizes.append(-2 * m)
        A = p.eq_matrix.tocoo()
        for r in range(m):
            rhs = float(p.eq_rhs[r])
            if rhs != 0:
                entries.append((0, bno, 2 * r + 1, 2 * r + 1, rhs))
                entries.append((0, bno, 2 * r + 2, 2 * r + 2, -rhs))
        for r, v, val in zip(A.row, A.col, A.data):
            entries.append((int(v) + 1, bno, 2 * int(r) + 1, 2 * int(r) + 1, float(val)))
            entries.append((int(v) + 1, bno, 2 * int(r) + 2, 2 * int(r) + 2, -float(val)))
    entries.sort(key=lambda e: (e[0], e[1], e[2], e[3]))
    return sizes, -p.objective, entries


def export_sdpa(p: SDPProblem, path: str | Path) -> None:
    """Write ``p`` as an SDPA sparse file (``.dat-s``)."""
    if p.eq_matrix.shape[0] == 0:
        raise MalformedProblem("problem has an empty constraint list")
    if p.num_vars == 0:
        raise MalformedProblem("problem has no variables")
    sizes, cvec, entries = _to_sdpa_data(p)
    lines = [str(p.num_vars), str(len(sizes)), " ".join(str(s) for s in sizes),
             " ".join(repr(float(v) + 0.0) for v in cvec)]
    lines += [f"{a} {b} {i} {j} {float(v) + 0.0!r}" for a, b, i, j, v in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_sdpa(path: str | Path) -> SDPProblem:
    """Read a file written by :func:`export_sdpa` (or any SDPA sparse file)."""
    from .sdpproblem import ProblemBuilder

    raw = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    raw = [ln for ln in raw if ln and not ln.startswith(("*", '"'))]
    tok = lambda s: s.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ").split()
    nvars = int(tok(raw[0])[0])
    nblocks = int(tok(raw[1])[0])
    sizes = [int(float(s)) for s in tok(raw[2])[:nblocks]]
    cvec = np.array([float(s) for s in tok(raw[3])[:nvars]])
    per_block: dict[int, list] = {k: [] for k in range(1, nblocks + 1)}
    for ln in raw[4:]:
        a, bno, i, j, v = tok(ln)[:5]
        per_block[int(bno)].append((int(a), int(i) - 1, int(j) - 1, float(v)))
    pb = ProblemBuilder(nvars)
    pb.objective[:] = -cvec
    for bno, side in enumerate(sizes, start=1):
        items = per_block[bno]
        if side > 0:
            const = np.zeros((side, side))
            ents = []
            for a, i, j, v in items:
                i, j = min(i, j), max(i, j)
                if a == 0:
                    const[i, j] = -v
                    const[j, i] = -v
                else:
                    ents.append((i, j, a - 1, v))
            pb.add_block(side, ents, const)
        else:
            # diagonal block: pairs of rows (r, r+1) written by export_sdpa become equalities
            k = -side
            rows: dict[int, dict[int, float]] = {}
            rhs = np.zeros(k)
            for a, i, j, v in items:
                if a == 0:
                    rhs[i] = v
                else:
                    rows.setdefault(i, {})[a - 1] = v
            paired = k % 2 == 0 and all(
                {v2: -c for v2, c in rows.get(2 * r, {}).items()} == rows.get(2 * r + 1, {}) and rhs[2 * r] == -rhs[2 * r + 1]
                for r in range(k // 2))
            if paired:
                for r in range(k // 2):
                    pb.add_eq(rows.get(2 * r, {}), rhs[2 * r])
            else:
                for r in range(k):
                    ents = [(0, 0, v2, c) for v2, c in rows.get(r, {}).items()]
                    pb.add_block(1, ents, np.array([[-rhs[r]]]))
    return pb.build({"source": str(path)})
