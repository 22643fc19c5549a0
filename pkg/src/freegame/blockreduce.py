"""Block transforms of permutation-invariant operators.

For a shape ``lam`` the representative matrix ``U_lam`` has one column per
semistandard tableau: the polytabloid ``u_tau``, an unnormalized integer vector.
An invariant ``Z`` is positive semidefinite iff ``U_lam^T Z U_lam`` is for
every ``lam`` with at most ``d`` rows. With a side factor the transform is
``(I_side (x) U_lam)^T Z (I_side (x) U_lam)``; rows and columns of the result
are indexed ``side_index * num_tableaux + tableau_index``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from typing import Mapping

import numpy as np

from . import symcomb as sc
from .invbasis import _check_cap, string_index
from .symcomb import FrequencyMatrix, Partition, Tableau, TypeVector


def _perm_sign(p: tuple[int, ...]) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def column_group(shape: Partition) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Permutations of cell labels preserving every column, with signs."""
    cols = shape.columns()
    out = []
    for choice in product(*[list(permutations(c)) for c in cols]):
        perm = list(range(shape.n))
        for col, img in zip(cols, choice):
            for src, dst in zip(col, img):
                perm[src] = dst
        p = tuple(perm)
        out.append((p, _perm_sign(p)))
    return tuple(out)


@lru_cache(maxsize=None)
def row_equivalent_fillings(tau: Tableau) -> tuple[tuple[int, ...], ...]:
    """Distinct fillings (0-based symbols per cell label) obtained by permuting rows."""
    per_row = []
    for row in tau.rows:
        per_row.append(sorted(set(permutations([x - 1 for x in row]))))
    return tuple(tuple(x for part in combo for x in part) for combo in product(*per_row))


@lru_cache(maxsize=None)
def _raw_terms(tau: Tableau) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Unaggregated terms ``(string, sign)`` of ``u_tau``: one per (filling, column perm)."""
    out = []
    group = column_group(tau.shape)
    for f in row_equivalent_fillings(tau):
        for c, sgn in group:
            out.append((tuple(f[c[y]] for y in range(len(f))), sgn))
    return tuple(out)


def polytabloid(tau: Tableau) -> dict[tuple[int, ...], int]:
    """Sparse integer vector ``u_tau`` as ``{string: coefficient}`` (strings 0-based)."""
    if not tau.is_semistandard():
        raise ValueError("tableau is not semistandard")
    vec: dict[tuple[int, ...], int] = {}
    for s, sgn in _raw_terms(tau):
        vec[s] = vec.get(s, 0) + sgn
    return {s: v for s, v in vec.items() if v != 0}


def polytabloid_dense(tau: Tableau, d: int, exact: bool = False) -> np.ndarray:
    out = np.zeros(d ** tau.shape.n, dtype=object if exact else float)
    for s, v in polytabloid(tau).items():
        out[string_index(s, d)] = v
    return out


def representative_matrix(shape: Partition, d: int, cap: int | None = None, exact: bool = False) -> np.ndarray:
    """``U_lam`` with columns ordered like ``semistandard_tableaux``; integer objects if ``exact``."""
    _check_cap(d, shape.n, cap)
    tabs = sc.semistandard_tableaux(shape, d)
    if not tabs:
        return np.zeros((d ** shape.n, 0), dtype=object if exact else float)
    return np.stack([polytabloid_dense(t, d, exact) for t in tabs], axis=1)


def block_sizes(n: int, d: int, side: int = 1) -> dict[Partition, int]:
    return {lam: side * sc.schur_dim(lam, d) for lam in sc.partitions(n, d)}


# ---------------------------------------------------------------- row shape


def block_transform_row(coeffs: Mapping, n: int, d: int, side: int | None = None, exact: bool = False) -> np.ndarray:
    """Closed-form transform of ``sum z C_{t,t'}`` for ``lam = (n)``.

    Without a side factor ``coeffs`` maps ``(t, t')`` to numbers; with one it maps
    ``(i, j, t, t')``. Rows follow ``semistandard_tableaux(Partition((n,)), d)``,
    whose tableaux are identified with their contents.
    """
    tys = tableau_types(Partition((n,)), d)
    pos = {t: k for k, t in enumerate(tys)}
    weight = [sc.multinomial(n, t) for t in tys]
    m = len(tys)
    s = 1 if side is None else side
    out = np.zeros((s * m, s * m), dtype=object if exact else float)
    for key, z in coeffs.items():
        if side is None:
            i, j, t, tp = 0, 0, key[0], key[1]
        else:
            i, j, t, tp = key
        a, b = pos[tuple(t)], pos[tuple(tp)]
        out[i * m + a, j * m + b] += weight[a] * weight[b] * z
    return out


# ---------------------------------------------------------------- general shape


@lru_cache(maxsize=None)
def g_polynomial(tau: Tableau, gamma: Tableau) -> dict[FrequencyMatrix, int]:
    """Monomial expansion of ``G_{tau,gamma}``: ``{D: coefficient}``.

    ``G = sum sgn(c) sgn(c') prod_y x[tau'(c(y)), gamma'(c'(y))]`` over
    row-equivalent fillings and column permutations of both tableaux; a
    monomial is recorded through its frequency matrix.
    """
    d = max(max(tau.reading_word), max(gamma.reading_word))
    d = max(d, 1)
    out: dict[FrequencyMatrix, int] = {}
    rt, rg = _raw_terms(tau), _raw_terms(gamma)
    for a, sa in rt:
        for b, sb in rg:
            D = sc.freq_matrix(a, b, d)
            out[D] = out.get(D, 0) + sa * sb
    return {D: v for D, v in out.items() if v != 0}


def _pad(D: FrequencyMatrix, d: int) -> FrequencyMatrix:
    k = len(D)
    if k == d:
        return D
    rows = [list(r) + [0] * (d - k) for r in D] + [[0] * d for _ in range(d - k)]
    return tuple(tuple(r) for r in rows)


def g_coefficients(tau: Tableau, gamma: Tableau, d: int) -> dict[FrequencyMatrix, int]:
    """``g_polynomial`` with frequency matrices padded to ``d x d``."""
    return {_pad(D, d): v for D, v in g_polynomial(tau, gamma).items()}


def block_transform_general(coeffs: Mapping, shape: Partition, d: int, side: int | None = None,
                            exact: bool = False) -> np.ndarray:
    """Transform of ``sum z |i><j| (x) A_D`` via the ``G`` polynomials.

    ``coeffs`` maps ``D`` (or ``(i, j, D)`` with a side factor) to numbers.
    With ``exact`` the result is an object array, so ``Fraction`` inputs stay exact.
    """
    tabs = sc.semistandard_tableaux(shape, d)
    m = len(tabs)
    s = 1 if side is None else side
    by_pair: dict[tuple[int, int], dict[FrequencyMatrix, float]] = {}
    for key, z in coeffs.items():
        i, j, D = (0, 0, key) if side is None else key
        by_pair.setdefault((i, j), {})[D] = z
    out = np.zeros((s * m, s * m), dtype=object if exact else float)
    for a, tau in enumerate(tabs):
        for b, gam in enumerate(tabs):
            g = g_coefficients(tau, gam, d)
            for (i, j), zs in by_pair.items():
                out[i * m + a, j * m + b] = sum(v * zs.get(D, 0) for D, v in g.items())
    return out


def block_transform_sparse(coeffs: Mapping, shape: Partition, d: int, side: int | None = None,
                           exact: bool = False) -> np.ndarray:
    """Fallback: explicit ``u_tau^T Z u_gamma`` from the aggregated sparse vectors."""
    tabs = sc.semistandard_tableaux(shape, d)
    vecs = [polytabloid(t) for t in tabs]
    m = len(tabs)
    s = 1 if side is None else side
    by_pair: dict[tuple[int, int], dict[FrequencyMatrix, float]] = {}
    for key, z in coeffs.items():
        i, j, D = (0, 0, key) if side is None else key
        by_pair.setdefault((i, j), {})[D] = z
    out = np.zeros((s * m, s * m), dtype=object if exact else float)
    for (i, j), zs in by_pair.items():
        for a in range(m):
            for b in range(m):
                acc = 0
                for x, vx in vecs[a].items():
                    for y, vy in vecs[b].items():
                        z = zs.get(sc.freq_matrix(x, y, d))
                        if z:
                            acc += vx * vy * z
                out[i * m + a, j * m + b] = acc
    return out


def dense_transform(Z: np.ndarray, shape: Partition, d: int, side: int = 1, cap: int | None = None,
                    exact: bool = False) -> np.ndarray:
    """Oracle: ``(I_side (x) U_lam)^T Z (I_side (x) U_lam)``; object arithmetic if ``exact``."""
    U = representative_matrix(shape, d, cap, exact)
    full = np.kron(np.eye(side, dtype=int).astype(object) if exact else np.eye(side), U)
    if Z.shape != (full.shape[0], full.shape[0]):
        raise ValueError("Z has the wrong size")
    return full.T @ Z @ full


def all_blocks(Z: np.ndarray, n: int, d: int, side: int = 1, cap: int | None = None) -> dict[Partition, np.ndarray]:
    return {lam: dense_transform(Z, lam, d, side, cap) for lam in sc.partitions(n, d)}


def tableau_types(shape: Partition, d: int) -> list[TypeVector]:
    return [t.content(d) for t in sc.semistandard_tableaux(shape, d)]
