"""Parameterized Hadamard expansion of polynomials.

For polynomial input the expansion is constructive: a monomial whose degree in
the y-block is at most ``l`` belongs to the Taylor part, every other monomial is
assigned to the remainder slot of a fixed degree ``l + 1`` divisor of its
y-part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Iterable, Sequence

from .errors import NonvanishingJetError, ShapeError
from .polyring import Polynomial, make_monomial


@dataclass(frozen=True)
class HadamardExpansion:
    x_vars: tuple
    y_vars: tuple
    order: int
    taylor_terms: dict = field(default_factory=dict)   # sigma -> polynomial in x
    remainders: dict = field(default_factory=dict)     # tau, |tau| = order + 1 -> polynomial in (x, y)

    def taylor(self, sigma: Sequence[int]) -> Polynomial:
        return self.taylor_terms.get(tuple(sigma), Polynomial.zero(self.x_vars))

    def y_power(self, multi_index: Sequence[int]) -> Polynomial:
        mono = make_monomial(zip(self.y_vars, multi_index))
        return Polynomial({mono: 1}, self.x_vars + self.y_vars)

    def reconstruct(self) -> Polynomial:
        acc = Polynomial.zero(self.x_vars + self.y_vars)
        for sigma, c in self.taylor_terms.items():
            acc = acc + self.y_power(sigma) * c
        for tau, h in self.remainders.items():
            acc = acc + self.y_power(tau) * h
        return acc

    def to_json(self) -> dict:
        return {
            "x": list(self.x_vars),
            "y": list(self.y_vars),
            "order": self.order,
            "taylor": {_key(s): str(p) for s, p in sorted(self.taylor_terms.items())},
            "remainders": {_key(t): str(p) for t, p in sorted(self.remainders.items())},
        }


def _key(multi_index) -> str:
    return "[" + ",".join(str(i) for i in multi_index) + "]"


def canonical_divisor(y_exp: Sequence[int], degree: int) -> tuple:
    """Smallest index sequence i1 <= ... <= i_degree dividing ``y^y_exp``, as a multi-index."""
    out = []
    need = degree
    for e in y_exp:
        take = min(e, need)
        out.append(take)
        need -= take
    return tuple(out)


def hadamard_expand(f: Polynomial, x_vars: Iterable[str], y_vars: Iterable[str],
                    l: int) -> HadamardExpansion:
    x_vars, y_vars = tuple(x_vars), tuple(y_vars)
    if l < 0:
        raise ShapeError("expansion order must be non-negative")
    if set(x_vars) & set(y_vars):
        raise ShapeError("x and y blocks must be disjoint")
    stray = f.free_vars() - set(x_vars) - set(y_vars)
    if stray:
        raise ShapeError(f"variables {sorted(stray)} belong to neither block")
    yset = set(y_vars)
    all_vars = x_vars + y_vars
    taylor: dict = {}
    rema: dict = {}
    for m, c in f.items():
        d = dict(m)
        y_exp = tuple(d.get(v, 0) for v in y_vars)
        x_mono = tuple(p for p in m if p[0] not in yset)
        if sum(y_exp) <= l:
            taylor.setdefault(y_exp, {})[x_mono] = c
        else:
            tau = canonical_divisor(y_exp, l + 1)
            rest = make_monomial([(v, e - t) for v, e, t in zip(y_vars, y_exp, tau)] + list(x_mono))
            rema.setdefault(tau, {})[rest] = c
    return HadamardExpansion(
        x_vars, y_vars, l,
        {s: Polynomial(t, x_vars) for s, t in taylor.items()},
        {t: Polynomial(r, all_vars) for t, r in rema.items()},
    )


def vanishing_quotient(f: Polynomial, y_vars: Iterable[str], l: int) -> dict:
    """Remainder coefficients of ``f`` when its y-jet of order ``l`` vanishes.

    Returns ``{tau: h_tau}`` with ``f == sum(y^tau * h_tau)``.
    """
    y_vars = tuple(y_vars)
    x_vars = tuple(v for v in f.vars if v not in set(y_vars) and v in f.free_vars())
    exp = hadamard_expand(f, x_vars, y_vars, l)
    bad = sorted(s for s, p in exp.taylor_terms.items() if not p.is_zero())
    if bad:
        raise NonvanishingJetError(
            f"jet of order {l} does not vanish; nonzero Taylor terms at {bad}",
            sigma=[list(s) for s in bad])
    return dict(exp.remainders)


def taylor_coefficient_via_derivative(f: Polynomial, x_vars, y_vars, sigma) -> Polynomial:
    """``(1/sigma!) * d^sigma f / dy^sigma`` at ``y = 0``, by differentiation."""
    g = f
    for v, s in zip(y_vars, sigma):
        if s:
            g = g.derivative(v, s)
    g = g.substitute({v: 0 for v in y_vars}, partial=True)
    return g * Fraction(1, prod(factorial(s) for s in sigma))
