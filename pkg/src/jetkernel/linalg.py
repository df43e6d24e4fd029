"""Small exact linear algebra over Q (and fraction-free elimination over Q[u])."""

from __future__ import annotations

from fractions import Fraction

from .errors import RankDeficientError
from .polyring import Polynomial


class Span:
    """Incrementally grown subspace of Q^n kept in reduced echelon form."""

    def __init__(self, n: int):
        self.n = n
        self.rows: dict = {}  # pivot column -> row with 1 at pivot

    def reduce(self, vec) -> list:
        v = [Fraction(x) for x in vec]
        for p, row in self.rows.items():
            c = v[p]
            if c:
                for i in range(self.n):
                    if row[i]:
                        v[i] -= c * row[i]
        return v

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        inv = 1 / v[piv]
        v = [x * inv for x in v]
        for p, row in self.rows.items():
            c = row[piv]
            if c:
                self.rows[p] = [a - c * b for a, b in zip(row, v)]
        self.rows[piv] = v
        return True

    def __contains__(self, vec) -> bool:
        return not any(self.reduce(vec))

    @property
    def dim(self) -> int:
        return len(self.rows)


def rank(rows) -> int:
    if not rows:
        return 0
    s = Span(len(rows[0]))
    for r in rows:
        s.add(r)
    return s.dim


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def inverse(m):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise RankDeficientError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [a - c * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def complete_columns(cols, n: int):
    """Extend independent columns of length ``n`` to a basis with standard vectors.

    Returns the square matrix (as rows) whose first columns are ``cols``.
    """
    span = Span(n)
    for c in cols:
        if not span.add(c):
            raise RankDeficientError("linear part is not of full column rank")
    # standard vectors at the non-pivot positions complete a reduced echelon basis
    extra = [[Fraction(int(i == j)) for j in range(n)] for i in range(n) if i not in span.rows]
    return transpose(list(cols) + extra)


def generic_rank(rows) -> int:
    """Rank over the fraction field of Q[u] of a matrix with polynomial entries."""
    m = [[x if isinstance(x, Polynomial) else Polynomial.const(x) for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        for i in range(r + 1, len(m)):
            a = m[i][col]
            if a.is_zero():
                continue
            m[i] = [p * x - a * y for x, y in zip(m[i], m[r])]
        r += 1
    return r
