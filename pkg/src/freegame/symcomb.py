"""Combinatorics of the symmetric group acting on tensor powers.

Conventions used by every other module:

* a type vector is a tuple of ``d`` counts summing to ``n``; lists of types are
  sorted lexicographically;
* a frequency matrix ``D`` is a ``d x d`` tuple of tuples; ``D[i][j]`` counts the
  positions ``k`` with ``(a_k, b_k) = (i, j)`` for a pair of strings ``(a, b)``;
  lists of frequency matrices are sorted lexicographically on the row-major
  flattening;
* tableau entries are 1-based symbols ``1..d``; everything else is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterator, Sequence

TypeVector = tuple[int, ...]
FrequencyMatrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be nonincreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def height(self) -> int:
        return len(self.parts)

    def cells(self) -> list[tuple[int, int]]:
        """Cells ``(row, col)`` in row-major order; the position is the cell label."""
        return [(r, c) for r, length in enumerate(self.parts) for c in range(length)]

    def columns(self) -> list[list[int]]:
        """Cell labels grouped by column."""
        cols: list[list[int]] = [[] for _ in range(self.parts[0] if self.parts else 0)]
        for label, (_, c) in enumerate(self.cells()):
            cols[c].append(label)
        return cols

    def rows(self) -> list[list[int]]:
        rows, start = [], 0
        for length in self.parts:
            rows.append(list(range(start, start + length)))
            start += length
        return rows

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions(n: int, max_height: int | None = None) -> list[Partition]:
    """Partitions of ``n`` with at most ``max_height`` parts, ``(n)`` first."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out: list[Partition] = []

    def rec(remaining: int, largest: int, acc: list[int]) -> None:
        if remaining == 0:
            out.append(Partition(tuple(acc)))
            return
        if max_height is not None and len(acc) >= max_height:
            return
        for p in range(min(remaining, largest), 0, -1):
            acc.append(p)
            rec(remaining - p, p, acc)
            acc.pop()

    rec(n, n, [])
    return out


def types(n: int, d: int) -> list[TypeVector]:
    """All weight vectors of length ``d`` summing to ``n``, lexicographically sorted."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0 and d >= 1")
    return list(_compositions(n, d))


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    # lexicographically increasing compositions of n into k nonnegative parts
    c = [0] * (k - 1) + [n]
    while True:
        yield tuple(c)
        if k == 1:
            return
        if c[-1] > 0:
            c[-2] += 1
            c[-1] -= 1
            continue
        j = k - 2
        while j >= 0 and c[j] == 0:
            j -= 1
        if j <= 0:
            return
        c[j - 1] += 1
        c[-1] = c[j] - 1
        c[j] = 0


def type_of(string: Sequence[int], d: int) -> TypeVector:
    counts = [0] * d
    for s in string:
        counts[s] += 1
    return tuple(counts)


def multinomial(n: int, t: Sequence[int]) -> int:
    """Exact ``n! / prod(t_i!)``."""
    if sum(t) != n or any(x < 0 for x in t):
        raise ValueError(f"type {tuple(t)} does not sum to {n}")
    return factorial(n) // prod(factorial(x) for x in t)


@dataclass(frozen=True)
class Tableau:
    """A filling of a Young diagram; ``rows[r][c]`` holds a symbol in ``1..d``."""

    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if tuple(len(r) for r in rows) != self.shape.parts:
            raise ValueError("filling does not match shape")
        object.__setattr__(self, "rows", rows)

    @property
    def reading_word(self) -> tuple[int, ...]:
        return tuple(x for row in self.rows for x in row)

    def is_semistandard(self) -> bool:
        for row in self.rows:
            if any(row[i] > row[i + 1] for i in range(len(row) - 1)):
                return False
        for r in range(len(self.rows) - 1):
            upper, lower = self.rows[r], self.rows[r + 1]
            if any(upper[c] >= lower[c] for c in range(len(lower))):
                return False
        return all(x >= 1 for x in self.reading_word)

    def content(self, d: int) -> TypeVector:
        return type_of([x - 1 for x in self.reading_word], d)


def semistandard_tableaux(shape: Partition, d: int) -> list[Tableau]:
    """Semistandard fillings with symbols ``1..d``, lexicographic in the reading word."""
    if shape.height > d:
        return []
    cells = shape.cells()
    word = [0] * len(cells)
    pos = {cell: k for k, cell in enumerate(cells)}
    out: list[Tableau] = []

    def rec(k: int) -> None:
        if k == len(cells):
            rows, start = [], 0
            for length in shape.parts:
                rows.append(tuple(word[start:start + length]))
                start += length
            out.append(Tableau(shape, tuple(rows)))
            return
        r, c = cells[k]
        low = 1
        if c > 0:
            low = max(low, word[pos[(r, c - 1)]])
        if r > 0:
            low = max(low, word[pos[(r - 1, c)]] + 1)
        # leave room for the strictly increasing column below
        below = sum(1 for rr in range(r + 1, shape.height) if shape.parts[rr] > c)
        for v in range(low, d - below + 1):
            word[k] = v
            rec(k + 1)

    rec(0)
    return out


def standard_tableaux_count(shape: Partition) -> int:
    """Number of standard tableaux by brute-force recursion on removable corners."""
    return _syt_count(shape.parts)


@lru_cache(maxsize=None)
def _syt_count(parts: tuple[int, ...]) -> int:
    if sum(parts) <= 1:
        return 1
    total = 0
    for i, p in enumerate(parts):
        nxt = parts[i + 1] if i + 1 < len(parts) else 0
        if p > nxt:
            child = list(parts)
            child[i] -= 1
            total += _syt_count(tuple(x for x in child if x > 0))
    return total


def hook_lengths(shape: Partition) -> list[int]:
    conj = [sum(1 for p in shape.parts if p > c) for c in range(shape.parts[0])] if shape.parts else []
    return [shape.parts[r] - c - 1 + conj[c] - r for r, c in shape.cells()]


def specht_dim(shape: Partition) -> int:
    """Hook length formula ``n! / prod h``."""
    return factorial(shape.n) // prod(hook_lengths(shape))


def schur_dim(shape: Partition, d: int) -> int:
    """Hook-content formula ``prod (d + c - r) / h``."""
    num = prod(d + c - r for r, c in shape.cells())
    val = Fraction(num, prod(hook_lengths(shape)))
    if val.denominator != 1:
        raise ArithmeticError("hook-content product is not an integer")
    return max(int(val), 0)


# ---------------------------------------------------------------- orbits


def orbit_representatives(n: int, d: int) -> list[FrequencyMatrix]:
    """All ``d x d`` frequency matrices with entry sum ``n``, row-major lexicographic."""
    if n < 1:
        raise ValueError("n must be positive")
    return [_reshape(flat, d) for flat in _compositions(n, d * d)]


def _reshape(flat: Sequence[int], d: int) -> FrequencyMatrix:
    return tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(d))


def contingency_tables(t: Sequence[int], tp: Sequence[int]) -> list[FrequencyMatrix]:
    """Nonnegative integer matrices with row sums ``t`` and column sums ``tp``."""
    t, tp = tuple(t), tuple(tp)
    if len(t) != len(tp):
        raise ValueError("types must have the same length")
    if sum(t) != sum(tp):
        raise ValueError("types must sum to the same n")
    d = len(t)
    out: list[FrequencyMatrix] = []
    flat = [0] * (d * d)
    col_left = list(tp)

    def rec(k: int, row_left: int) -> None:
        i, j = divmod(k, d)
        if j == d - 1:
            v = row_left
            if v > col_left[j]:
                return
            flat[k] = v
            col_left[j] -= v
            if i == d - 1:
                out.append(_reshape(flat, d))
            else:
                rec(k + 1, t[i + 1])
            col_left[j] += v
            return
        for v in range(min(row_left, col_left[j]) + 1):
            flat[k] = v
            col_left[j] -= v
            rec(k + 1, row_left - v)
            col_left[j] += v

    rec(0, t[0])
    return out


def freq_matrix(a: Sequence[int], b: Sequence[int], d: int) -> FrequencyMatrix:
    if len(a) != len(b):
        raise ValueError("strings must have equal length")
    m = [[0] * d for _ in range(d)]
    for x, y in zip(a, b):
        m[x][y] += 1
    return tuple(tuple(r) for r in m)


def representative_strings(D: FrequencyMatrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The canonical pair ``(a, b)`` in the orbit of ``D``.

    Cells are expanded in row-major order, each repeated ``D[i][j]`` times, so
    ``a`` is sorted and has type ``D 1`` while ``b`` has type ``D^T 1``.
    """
    a, b = [], []
    for i, row in enumerate(D):
        for j, v in enumerate(row):
            a.extend([i] * v)
            b.extend([j] * v)
    return tuple(a), tuple(b)


def orbit_size(D: FrequencyMatrix) -> int:
    n = sum(map(sum, D))
    return factorial(n) // prod(factorial(v) for row in D for v in row)


def row_sums(D: FrequencyMatrix) -> TypeVector:
    return tuple(sum(r) for r in D)


def col_sums(D: FrequencyMatrix) -> TypeVector:
    return tuple(sum(c) for c in zip(*D))


def transpose(D: FrequencyMatrix) -> FrequencyMatrix:
    return tuple(zip(*D))


def is_diagonal(D: FrequencyMatrix) -> bool:
    return all(v == 0 for i, row in enumerate(D) for j, v in enumerate(row) if i != j)


def add_unit(D: FrequencyMatrix, i: int, j: int, delta: int = 1) -> FrequencyMatrix:
    rows = [list(r) for r in D]
    rows[i][j] += delta
    return tuple(tuple(r) for r in rows)


def symmetric_dim(n: int, d: int) -> int:
    """Dimension ``binom(n + d - 1, n)`` of the symmetric subspace."""
    return comb(n + d - 1, n)
