"""Solver-agnostic standard form: maximize ``c^T x`` subject to
``F0_k + sum_v x_v F_{k,v} >= 0`` for every block ``k`` and ``A x = b``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp


def triu_pack(i: np.ndarray, j: np.ndarray, side: int) -> np.ndarray:
    """Row-major upper-triangle position of entry ``(min, max)``."""
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    return lo * side - lo * (lo - 1) // 2 + (hi - lo)


@dataclass(frozen=True)
class PSDBlock:
    """One linear matrix inequality.

    ``coeffs`` has one row per upper-triangle entry (row-major order) and one
    column per variable; the entry value of the block is
    ``constant[i, j] + coeffs[row(i, j)] @ x``.
    """

    side: int
    coeffs: sp.csc_matrix
    constant: np.ndarray

    def __post_init__(self) -> None:
        if self.side <= 0:
            raise ValueError("block side must be positive")
        if self.coeffs.shape[0] != self.side * (self.side + 1) // 2:
            raise ValueError("coefficient rows must cover the upper triangle")
        c = np.asarray(self.constant, dtype=float)
        if c.shape != (self.side, self.side) or not np.allclose(c, c.T):
            raise ValueError("constant must be a symmetric side x side matrix")
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "coeffs", sp.csc_matrix(self.coeffs))

    def matrix(self, var: int) -> sp.csr_matrix:
        """The symmetric coefficient matrix of one variable."""
        col = self.coeffs[:, var].tocoo()
        I, J = np.triu_indices(self.side)
        r, c = I[col.row], J[col.row]
        M = sp.coo_matrix((col.data, (r, c)), shape=(self.side, self.side)).tocsr()
        return (M + sp.triu(M, 1).T).tocsr()

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        vals = self.coeffs @ x
        I, J = np.triu_indices(self.side)
        out = self.constant.copy()
        out[I, J] += vals
        out[J, I] = out[I, J]
        return out

    def variables(self) -> np.ndarray:
        return np.unique(self.coeffs.nonzero()[1])


@dataclass(frozen=True)
class SDPProblem:
    num_vars: int
    objective: np.ndarray
    psd_blocks: tuple[PSDBlock, ...]
    eq_matrix: sp.csr_matrix
    eq_rhs: np.ndarray
    metadata: Mapping = field(default_factory=dict)
    objective_constant: float = 0.0

    def __post_init__(self) -> None:
        obj = np.asarray(self.objective, dtype=float)
        if obj.shape != (self.num_vars,):
            raise ValueError("objective length must equal num_vars")
        A = sp.csr_matrix(self.eq_matrix)
        if A.shape[1] != self.num_vars:
            raise ValueError("constraint matrix has the wrong width")
        rhs = np.asarray(self.eq_rhs, dtype=float)
        if rhs.shape != (A.shape[0],):
            raise ValueError("rhs length must equal the number of constraints")
        if A.shape[0] and np.any(np.diff(A.indptr) == 0):
            raise ValueError("every equality needs at least one coefficient")
        for blk in self.psd_blocks:
            if blk.coeffs.shape[1] != self.num_vars:
                raise ValueError("block coefficient width must equal num_vars")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "eq_matrix", A)
        object.__setattr__(self, "eq_rhs", rhs)
        object.__setattr__(self, "psd_blocks", tuple(self.psd_blocks))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def eq_constraints(self) -> list[tuple[dict[int, float], float]]:
        out = []
        A = self.eq_matrix
        for r in range(A.shape[0]):
            lo, hi = A.indptr[r], A.indptr[r + 1]
            out.append(({int(c): float(v) for c, v in zip(A.indices[lo:hi], A.data[lo:hi])}, float(self.eq_rhs[r])))
        return out

    def value(self, x: np.ndarray) -> float:
        return float(self.objective @ x + self.objective_constant)

    def residual(self, x: np.ndarray) -> float:
        if self.eq_matrix.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.eq_matrix @ x - self.eq_rhs)))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.int64(self.num_vars).tobytes())
        h.update(self.objective.tobytes())
        for blk in self.psd_blocks:
            c = blk.coeffs.tocoo()
            h.update(np.int64(blk.side).tobytes())
            for arr in (c.row, c.col, c.data, blk.constant):
                h.update(np.ascontiguousarray(arr).tobytes())
        A = self.eq_matrix.tocoo()
        for arr in (A.row, A.col, A.data, self.eq_rhs):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


class ProblemBuilder:
    """Incremental assembly of an :class:`SDPProblem` from triplets."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self.objective = np.zeros(num_vars)
        self.objective_constant = 0.0
        self._blocks: list[tuple[int, list, list, list, np.ndarray]] = []
        self._rows: list[dict[int, float]] = []
        self._rhs: list[float] = []

    def add_block(self, side: int, entries: Iterable[tuple[int, int, int, float]],
                  constant: np.ndarray | None = None) -> None:
        """``entries`` are ``(i, j, var, coeff)``; only ``i <= j`` entries are kept."""
        rows, cols, vals = [], [], []
        for i, j, v, c in entries:
            if i > j:
                continue
            rows.append(i * side - i * (i - 1) // 2 + (j - i))
            cols.append(v)
            vals.append(c)
        const = np.zeros((side, side)) if constant is None else np.asarray(constant, dtype=float)
        self._blocks.append((side, rows, cols, vals, const))

    def add_block_arrays(self, side: int, pos: np.ndarray, var: np.ndarray, val: np.ndarray,
                         constant: np.ndarray | None = None) -> None:
        const = np.zeros((side, side)) if constant is None else np.asarray(constant, dtype=float)
        self._blocks.append((side, list(pos), list(var), list(val), const))

    def add_eq(self, coeffs: Mapping[int, float], rhs: float, tol: float = 0.0) -> bool:
        row = {int(k): float(v) for k, v in coeffs.items() if abs(v) > tol}
        if not row:
            if abs(rhs) > 1e-12:
                # keep an explicitly inconsistent row visible to the solver
                raise ValueError("equality with no coefficients but nonzero rhs")
            return False
        self._rows.append(row)
        self._rhs.append(float(rhs))
        return True

    def build(self, metadata: Mapping | None = None) -> SDPProblem:
        blocks = []
        for side, rows, cols, vals, const in self._blocks:
            m = sp.coo_matrix((vals, (rows, cols)), shape=(side * (side + 1) // 2, self.num_vars)).tocsc()
            m.sum_duplicates()
            m.eliminate_zeros()
            blocks.append(PSDBlock(side, m, const))
        data, ri, ci = [], [], []
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                ri.append(r)
                ci.append(c)
                data.append(v)
        A = sp.coo_matrix((data, (ri, ci)), shape=(len(self._rows), self.num_vars)).tocsr()
        A.sum_duplicates()
        return SDPProblem(self.num_vars, self.objective.copy(), tuple(blocks), A,
                          np.array(self._rhs, dtype=float), dict(metadata or {}), self.objective_constant)
