"""Canonical bases of permutation-invariant operators and their closed forms.

``A_D`` is the 0/1 matrix on ``(C^d)^{(x) n}`` with ones exactly at the index
pairs whose frequency matrix is ``D``. ``C_{t,t'}`` is the sum of ``A_D`` over
all ``D`` with row sums ``t`` and column sums ``t'``; it equals
``|s_t><s_t'|`` with ``|s_t>`` the unnormalized sum of strings of type ``t``.

Tensor factors are ordered big-endian: copy 1 is the most significant digit of
a flat index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import symcomb as sc
from ._kernels import pair_counts
from .symcomb import FrequencyMatrix, TypeVector

DENSE_CAP = 4096


class DenseCapExceeded(ValueError):
    pass


def _check_cap(d: int, n: int, cap: int | None) -> int:
    cap = DENSE_CAP if cap is None else cap
    dim = d ** n
    if dim > cap:
        raise DenseCapExceeded(f"d^n = {dim} exceeds the dense cap {cap}")
    return dim


@dataclass(frozen=True)
class InvariantBasisElement:
    """``A_D`` (kind ``"full"``) or ``C_{t,t'}`` (kind ``"bose"``).

    For Bose elements ``D`` is the first contingency table of the class, so
    ``t`` and ``t'`` are its row and column sums.
    """

    D: FrequencyMatrix
    localDim: int
    n: int
    kind: str = "full"

    def __post_init__(self) -> None:
        if self.kind not in ("full", "bose"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if len(self.D) != self.localDim or sum(map(sum, self.D)) != self.n:
            raise ValueError("frequency matrix does not match (d, n)")

    @classmethod
    def bose(cls, t: TypeVector, tp: TypeVector) -> "InvariantBasisElement":
        D = sc.contingency_tables(t, tp)[0]
        return cls(D, len(t), sum(t), "bose")

    @property
    def t(self) -> TypeVector:
        return sc.row_sums(self.D)

    @property
    def tp(self) -> TypeVector:
        return sc.col_sums(self.D)

    def members(self) -> list[FrequencyMatrix]:
        if self.kind == "full":
            return [self.D]
        return sc.contingency_tables(self.t, self.tp)

    def nnz(self) -> int:
        return sum(sc.orbit_size(D) for D in self.members())

    def dense(self, cap: int | None = None) -> np.ndarray:
        dim = _check_cap(self.localDim, self.n, cap)
        out = np.zeros((dim, dim), dtype=np.int64)
        for D in self.members():
            for r, c in orbit_indices(D):
                out[r, c] = 1
        return out


@dataclass(frozen=True)
class SideBasisElement:
    """``|i><j|`` on a side factor of dimension ``sideDim`` tensored with ``core``."""

    i: int
    j: int
    sideDim: int
    core: InvariantBasisElement

    def __post_init__(self) -> None:
        if not (0 <= self.i < self.sideDim and 0 <= self.j < self.sideDim):
            raise ValueError("side index out of range")

    def dense(self, cap: int | None = None) -> np.ndarray:
        unit = np.zeros((self.sideDim, self.sideDim), dtype=np.int64)
        unit[self.i, self.j] = 1
        return np.kron(unit, self.core.dense(cap))


def string_index(s: tuple[int, ...] | list[int], d: int) -> int:
    idx = 0
    for x in s:
        idx = idx * d + x
    return idx


def _multiset_permutations(items: list[tuple[int, int]]) -> Iterator[list[tuple[int, int]]]:
    # lexicographic next-permutation over a sorted multiset
    seq = sorted(items)
    n = len(seq)
    while True:
        yield list(seq)
        k = n - 2
        while k >= 0 and seq[k] >= seq[k + 1]:
            k -= 1
        if k < 0:
            return
        m = n - 1
        while seq[m] <= seq[k]:
            m -= 1
        seq[k], seq[m] = seq[m], seq[k]
        seq[k + 1:] = reversed(seq[k + 1:])


def orbit_pairs(D: FrequencyMatrix) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All string pairs ``(a, b)`` in the orbit of ``D``."""
    a, b = sc.representative_strings(D)
    for perm in _multiset_permutations(list(zip(a, b))):
        yield tuple(p[0] for p in perm), tuple(p[1] for p in perm)


def orbit_indices(D: FrequencyMatrix) -> Iterator[tuple[int, int]]:
    d = len(D)
    for a, b in orbit_pairs(D):
        yield string_index(a, d), string_index(b, d)


def bose_from_full(t: TypeVector, tp: TypeVector) -> list[FrequencyMatrix]:
    """Frequency matrices whose ``A_D`` sum to ``C_{t,t'}``."""
    return sc.contingency_tables(t, tp)


def trace_full(D: FrequencyMatrix) -> int:
    return sc.orbit_size(D) if sc.is_diagonal(D) else 0


def trace_bose(t: TypeVector, tp: TypeVector, n: int | None = None) -> int:
    n = sum(t) if n is None else n
    return sc.multinomial(n, t) if tuple(t) == tuple(tp) else 0


def ptrace_tail_full(D: FrequencyMatrix) -> list[tuple[int, tuple[int, int]]]:
    """``tr_{2..n} A_D`` as a list of ``(coefficient, (w, z))`` matrix units on copy 1."""
    n = sum(map(sum, D))
    d = len(D)
    out = []
    for w in range(d):
        for z in range(d):
            if D[w][z] == 0:
                continue
            rest = sc.add_unit(D, w, z, -1)
            if sc.is_diagonal(rest):
                out.append((sc.multinomial(n - 1, [rest[k][k] for k in range(d)]), (w, z)))
    return out


def ptrace_tail_bose(t: TypeVector, tp: TypeVector, n: int | None = None) -> list[tuple[int, tuple[int, int]]]:
    """``tr_{2..n} C_{t,t'}`` as a list of ``(coefficient, (a1, b1))`` terms.

    Empty when the types differ by more than one unit transfer. When ``t != t'``
    there is exactly one term ``binom(n-1, t - e_a1) |a1><b1|``; when ``t = t'``
    there is one diagonal term per symbol present in ``t``.
    """
    t, tp = tuple(t), tuple(tp)
    n = sum(t) if n is None else n
    d = len(t)
    out = []
    for w in range(d):
        if t[w] == 0:
            continue
        red = list(t)
        red[w] -= 1
        for z in range(d):
            if tp[z] == 0:
                continue
            redp = list(tp)
            redp[z] -= 1
            if red == redp:
                out.append((sc.multinomial(n - 1, red), (w, z)))
    return out


def split_first_copy(t: TypeVector, tp: TypeVector) -> list[tuple[tuple[int, int], TypeVector, TypeVector, int]]:
    """Split ``C_{t,t'}`` by the matrix unit on copy 1.

    Returns ``((w, z), t - e_w, t' - e_z, count)`` with ``count`` the number of
    nonzero entries of ``C_{t,t'}`` whose first-copy pair is ``(w, z)``.
    """
    n = sum(t)
    out = []
    for w in range(len(t)):
        for z in range(len(tp)):
            if t[w] and tp[z]:
                r = list(t)
                r[w] -= 1
                rp = list(tp)
                rp[z] -= 1
                out.append(((w, z), tuple(r), tuple(rp),
                            sc.multinomial(n - 1, r) * sc.multinomial(n - 1, rp)))
    return out


def branch_full(D: FrequencyMatrix, dL: int, dR: int) -> list[tuple[FrequencyMatrix, tuple[int, int], int]]:
    """``tr`` over the L part of copy n of ``A_D`` for the composite symbol ``w = l*dR + r``.

    Returns ``(D', (r, r'), multiplicity)`` terms of ``A_{D'} (x) |r><r'|``.
    """
    d = len(D)
    if d != dL * dR:
        raise ValueError("composite dimension mismatch")
    out = []
    for w in range(d):
        for z in range(d):
            if D[w][z] and w // dR == z // dR:
                out.append((sc.add_unit(D, w, z, -1), (w % dR, z % dR), 1))
    return out


def branch_subfactor(t: TypeVector, tp: TypeVector, dL: int, dR: int) -> list[tuple[TypeVector, TypeVector, tuple[int, int], int]]:
    """``tr`` over the L part of copy n of ``C_{t,t'}`` on composite copies ``d = dL*dR``.

    Returns ``(t_red, t'_red, (r, r'), multiplicity)`` terms meaning
    ``multiplicity * C^{(n-1)}_{t_red, t'_red} (x) |r><r'|``.
    """
    d = len(t)
    if d != dL * dR or len(tp) != d:
        raise ValueError("composite dimension mismatch")
    out = []
    for w in range(d):
        if t[w] == 0:
            continue
        for z in range(d):
            if tp[z] == 0 or w // dR != z // dR:
                continue
            r = list(t)
            r[w] -= 1
            rp = list(tp)
            rp[z] -= 1
            out.append((tuple(r), tuple(rp), (w % dR, z % dR), 1))
    return out


def coefficients_bose(entry: Callable[[int, int], float], n: int, d: int) -> dict[tuple[TypeVector, TypeVector], float]:
    """Coefficients of a Bose-supported operator in the ``C_{t,t'}`` basis.

    One oracle query per class, at the representative pair of the first
    contingency table of the class.
    """
    out = {}
    tys = sc.types(n, d)
    for t in tys:
        for tp in tys:
            D = sc.contingency_tables(t, tp)[0]
            a, b = sc.representative_strings(D)
            out[(t, tp)] = entry(string_index(a, d), string_index(b, d))
    return out


def coefficients_full(entry: Callable[[int, int], float], n: int, d: int) -> dict[FrequencyMatrix, float]:
    out = {}
    for D in sc.orbit_representatives(n, d):
        a, b = sc.representative_strings(D)
        out[D] = entry(string_index(a, d), string_index(b, d))
    return out


# ---------------------------------------------------------------- dense helpers


def orbit_labels(n: int, d: int, cap: int | None = None) -> tuple[np.ndarray, list[FrequencyMatrix]]:
    """Label every entry of a ``d^n x d^n`` matrix by its orbit index."""
    dim = _check_cap(d, n, cap)
    reps = sc.orbit_representatives(n, d)
    index = {tuple(v for row in D for v in row): k for k, D in enumerate(reps)}
    rr, cc = np.divmod(np.arange(dim * dim, dtype=np.int64), dim)
    counts = pair_counts(rr, cc, n, d)
    uniq, inv = np.unique(counts, axis=0, return_inverse=True)
    lut = np.array([index[tuple(int(v) for v in u)] for u in uniq], dtype=np.int64)
    return lut[inv.reshape(-1)].reshape(dim, dim), reps


def dense_from_full(coeffs: dict[FrequencyMatrix, float], n: int, d: int, cap: int | None = None) -> np.ndarray:
    labels, reps = orbit_labels(n, d, cap)
    vals = np.array([coeffs.get(D, 0.0) for D in reps], dtype=float)
    return vals[labels]


def dense_from_bose(coeffs: dict[tuple[TypeVector, TypeVector], float], n: int, d: int, cap: int | None = None) -> np.ndarray:
    labels, reps = orbit_labels(n, d, cap)
    vals = np.array([coeffs.get((sc.row_sums(D), sc.col_sums(D)), 0.0) for D in reps], dtype=float)
    return vals[labels]


def permutation_matrix(perm: tuple[int, ...], d: int) -> np.ndarray:
    """Operator sending copy ``k`` to position ``perm[k]``."""
    n = len(perm)
    dim = d ** n
    idx = np.arange(dim)
    digits = np.stack([(idx // d ** (n - 1 - k)) % d for k in range(n)])
    new = np.zeros(dim, dtype=np.int64)
    for k in range(n):
        new += digits[k] * d ** (n - 1 - perm[k])
    P = np.zeros((dim, dim))
    P[new, idx] = 1.0
    return P


def ptrace(rho: np.ndarray, dims: list[int], keep: list[int]) -> np.ndarray:
    """Partial trace keeping the listed subsystems (in their original order)."""
    k = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(k) if i not in keep]
    for count, i in enumerate(sorted(traced, reverse=True)):
        cur = k - count
        t = np.trace(t, axis1=i, axis2=i + cur)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)
