"""Weil algebras: finite-dimensional local quotients Q[e1..ed]/I with nilpotent maximal ideal."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .errors import NotInIdealError, NotNilpotentError, ShapeError
from .polyring import (
    GroebnerBasis,
    Polynomial,
    buchberger,
    divide,
    make_monomial,
    monomials_of_degree,
    natural_key,
    standard_monomials,
)

DEFAULT_K_MAX = 32


@dataclass(frozen=True)
class WeilAlgebra:
    """``Q[vars]/(generators)`` together with its normal-form data.

    ``generators`` are kept verbatim (they are the h-vector used by witness
    constructions); ``gb`` is the reduced Groebner basis used for normal forms.
    """

    vars: tuple
    generators: tuple
    gb: GroebnerBasis
    k: int
    basis: tuple
    name: str = field(default="", compare=False)

    @property
    def d(self) -> int:
        return len(self.vars)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        label = self.name or "WeilAlgebra"
        gens = ", ".join(str(g) for g in self.generators)
        return f"<{label} Q[{','.join(self.vars)}]/({gens}) dim={self.dim} k={self.k}>"

    def element(self, p) -> "WeilElement":
        return normal_form(p, self)

    def is_point(self) -> bool:
        return self.d == 0


@dataclass(frozen=True)
class WeilElement:
    algebra: WeilAlgebra
    value: Polynomial

    def _lift(self, other):
        if isinstance(other, WeilElement):
            if other.algebra != self.algebra:
                raise ShapeError("elements of different Weil algebras")
            return other.value
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(other)

    def __add__(self, other):
        return WeilElement(self.algebra, self.value + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return WeilElement(self.algebra, self.value - self._lift(other))

    def __neg__(self):
        return WeilElement(self.algebra, -self.value)

    def __mul__(self, other):
        return normal_form(self.value * self._lift(other), self.algebra)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = normal_form(Polynomial.const(1), self.algebra)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def coordinates(self) -> list:
        """Coefficients on ``algebra.basis``; parameter-dependent entries are polynomials."""
        groups = self.value.split(self.algebra.vars)
        out = []
        for m in self.algebra.basis:
            c = groups.get(m)
            if c is None:
                out.append(Fraction(0))
            elif c.is_constant():
                out.append(c.constant())
            else:
                out.append(c)
        return out

    def __str__(self):
        return f"[{self.value}]"


def _resolve_vars(d: int, generators: Sequence[Polynomial], vars) -> tuple:
    if vars is not None:
        vars = tuple(vars)
        if len(vars) != d or len(set(vars)) != d:
            raise ShapeError(f"expected {d} distinct variable names, got {vars}")
        stray = set().union(*(g.free_vars() for g in generators)) - set(vars) if generators else set()
        if stray:
            raise ShapeError(f"generators use undeclared variables {sorted(stray)}")
        return vars
    used: list = []
    for g in generators:
        for v in g.vars:
            if v in g.free_vars() and v not in used:
                used.append(v)
    if len(used) > d:
        raise ShapeError(f"generators mention {len(used)} variables but d={d}")
    if len(used) < d:
        # a variable absent from every generator can never be nilpotent
        raise NotNilpotentError(
            f"only {len(used)} of {d} variables occur in the generators; "
            "the remaining coordinates are not nilpotent")
    return tuple(sorted(used, key=natural_key))


def make_weil(d: int, generators: Iterable, k_max: int = DEFAULT_K_MAX, vars=None,
              name: str = "", pair_cap: int | None = None) -> WeilAlgebra:
    """Build the Weil algebra presented by ``generators`` in ``d`` variables.

    Raises ``NotNilpotentError`` unless every monomial of degree ``k_max + 1``
    vanishes in the quotient.
    """
    gens = tuple(g if isinstance(g, Polynomial) else Polynomial.parse(str(g))
                 for g in generators)
    vars = _resolve_vars(d, gens, vars)
    gens = tuple(g.with_vars(vars) for g in gens)
    gb = buchberger(gens, order=vars, pair_cap=pair_cap)
    if gb.is_unit():
        raise NotNilpotentError("the ideal is the unit ideal; the quotient is the zero ring")
    k = _nilpotency_order(gb, k_max)
    basis = tuple(standard_monomials(gb, k))
    return WeilAlgebra(vars, gens, gb, k, basis, name)


def _nilpotency_order(gb: GroebnerBasis, k_max: int) -> int:
    order = gb.order
    for k in range(0, k_max + 1):
        if all(divide(_mono_poly(order, e), gb)[1].is_zero()
               for e in monomials_of_degree(len(order), k + 1)):
            return k
    raise NotNilpotentError(
        f"some monomial of degree {k_max + 1} has nonzero normal form", k_max=k_max)


def _mono_poly(order, e) -> Polynomial:
    return Polynomial({make_monomial(zip(order, e)): 1}, order)


def disk_vars(d: int, prefix: str = "e") -> tuple:
    return tuple(f"{prefix}{i}" for i in range(1, d + 1))


@lru_cache(maxsize=None)
def disk(d: int, k: int, vars: tuple | None = None) -> WeilAlgebra:
    """The infinitesimal disk of dimension ``d`` and order ``k``."""
    if d < 0 or k < 0:
        raise ShapeError("disk dimension and order must be non-negative")
    vars = tuple(vars) if vars is not None else disk_vars(d)
    gens = [_mono_poly(vars, e) for e in monomials_of_degree(d, k + 1)] if d else []
    return make_weil(d, gens, k_max=k + 1, vars=vars, name=f"D{d}({k})")


POINT = disk(0, 0)


def _fresh(name: str, taken: set) -> str:
    i = 2
    while f"{name}_{i}" in taken:
        i += 1
    return f"{name}_{i}"


def weil_tensor(a: WeilAlgebra, b: WeilAlgebra) -> WeilAlgebra:
    """Tensor product; ``b``'s variables are renamed apart from ``a``'s when they clash."""
    taken = set(a.vars)
    mapping = {}
    for v in b.vars:
        new = v if v not in taken else _fresh(v, taken | set(b.vars))
        mapping[v] = new
        taken.add(new)
    vars = a.vars + tuple(mapping[v] for v in b.vars)
    gens = list(a.generators) + [g.rename(mapping) for g in b.generators]
    name = f"{a.name}*{b.name}" if a.name and b.name else ""
    return make_weil(len(vars), gens, k_max=a.k + b.k + 1, vars=vars, name=name)


def normal_form(p, A: WeilAlgebra) -> WeilElement:
    """Reduce ``p`` modulo the ideal; variables outside ``A.vars`` act as parameters."""
    if not isinstance(p, Polynomial):
        p = Polynomial.const(p) if not isinstance(p, str) else Polynomial.parse(p)
    if not A.vars:
        return WeilElement(A, p)
    return WeilElement(A, divide(p, A.gb)[1])


def ideal_decompose(p: Polynomial, A: WeilAlgebra) -> list:
    """Coefficients ``mu`` with ``p == sum(h_i * mu_i)`` over the original generators."""
    quotients, rem = divide(p, A.gb)
    if not rem.is_zero():
        raise NotInIdealError(f"{p} is not in the ideal ({', '.join(map(str, A.generators))})",
                              normal_form=str(rem))
    n = len(A.generators)
    mu = [Polynomial.zero(p.vars) for _ in range(n)]
    for q, row in zip(quotients, A.gb.cofactors):
        if q.is_zero():
            continue
        for i in range(n):
            if not row[i].is_zero():
                mu[i] = mu[i] + q * row[i]
    return mu


def expected_disk_dim(d: int, k: int) -> int:
    return comb(d + k, d)
