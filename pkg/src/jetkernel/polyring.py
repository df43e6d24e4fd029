"""Exact multivariate polynomials over the rationals.

Monomials are stored sparsely as tuples of ``(variable, exponent)`` pairs
sorted by variable name, so polynomials over different variable sets can be
combined without re-indexing.  Term order questions (leading terms, Groebner
bases, division) are always answered relative to an explicit variable order,
using graded reverse lexicographic comparison.
"""

from __future__ import annotations

import heapq
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .errors import MissingVariableError, ParseError, ResourceLimitError

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable, no zero exponents

ONE: Monomial = ()
DEFAULT_PAIR_CAP = 100_000



def natural_key(name: str):
    """Sort key that orders ``e2`` before ``e10``."""
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok)
            for tok in re.findall(r"\d+|\D+", name)]


def make_monomial(exps) -> Monomial:
    items = exps.items() if isinstance(exps, Mapping) else exps
    return tuple(sorted((v, int(e)) for v, e in items if e))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _coerce_coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _merge_vars(declared: Iterable[str] | None, terms) -> tuple:
    out = list(declared or ())
    seen = set(out)
    extra = {v for m in terms for v, _ in m if v not in seen}
    out.extend(sorted(extra, key=natural_key))
    return tuple(out)


def _union_vars(a: Sequence[str], b: Sequence[str]) -> tuple:
    if a == b:
        return tuple(a)
    seen = set(a)
    return tuple(a) + tuple(v for v in b if v not in seen)


# dict-level helpers: {Monomial: Fraction}

def _dadd(acc: dict, other: dict, scale: Fraction = Fraction(1)) -> None:
    for m, c in other.items():
        s = acc.get(m, 0) + c * scale
        if s:
            acc[m] = s
        else:
            acc.pop(m, None)


def _dmul(a: dict, b: dict) -> dict:
    if len(a) * len(b) > 16:
        pk = _Packing(_all_names(a, b), _max_degree(a) + _max_degree(b))
        da, ia = pk.scaled(a)
        db, ib = pk.scaled(b)
        return pk.unscaled(da * db, _imul(ia, ib))
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            s = out.get(m, 0) + ca * cb
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def _dpow(a: dict, n: int) -> dict:
    pk = _Packing(_all_names(a), _max_degree(a) * n)
    den, ia = pk.scaled(a)
    return pk.unscaled(den ** n, _ipow(ia, n))


# integer core: a rational polynomial is carried as (denominator, {Monomial: int})

def _scaled(d: dict) -> tuple:
    den = lcm(*(c.denominator for c in d.values())) if d else 1
    return den, {m: c.numerator * (den // c.denominator) for m, c in d.items()}


def _imul(a: dict, b: dict) -> dict:
    """Product of integer polynomials keyed by packed exponent integers."""
    out: dict = {}
    get = out.get
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = ma + mb
            out[m] = get(m, 0) + ca * cb
    return out


def _ipow(a: dict, n: int) -> dict:
    result = {0: 1}
    base = a
    while n:
        if n & 1:
            result = _imul(result, base)
        n >>= 1
        if n:
            base = _imul(base, base)
    return result


class _Packing:
    """Encode monomials over fixed names as integers so that multiplication is addition."""

    def __init__(self, names, max_degree: int):
        self.names = sorted(set(names))
        self.bits = max(2, (max_degree + 1).bit_length())
        self.mask = (1 << self.bits) - 1
        self.shift = {v: i * self.bits for i, v in enumerate(self.names)}

    def pack(self, m: Monomial) -> int:
        sh = self.shift
        return sum(e << sh[v] for v, e in m)

    def unpack(self, key: int) -> Monomial:
        out = []
        bits, mask = self.bits, self.mask
        for v in self.names:
            if not key:
                break
            e = key & mask
            if e:
                out.append((v, e))
            key >>= bits
        return tuple(out)

    def scaled(self, d: dict) -> tuple:
        den, ints = _scaled(d)
        return den, {self.pack(m): c for m, c in ints.items()}

    def unscaled(self, den: int, d: dict) -> dict:
        unpack = self.unpack
        if den == 1:
            return {unpack(k): Fraction(v) for k, v in d.items() if v}
        return {unpack(k): Fraction(v, den) for k, v in d.items() if v}


def _all_names(*dicts) -> set:
    return {v for d in dicts for m in d for v, _ in m}


def _max_degree(d: dict) -> int:
    return max((mono_degree(m) for m in d), default=0)


class Polynomial:
    """Immutable polynomial with rational coefficients.

    ``vars`` is the declared variable order (used for display and as the
    default term order); equality compares only the normalized terms.
    """

    __slots__ = ("_terms", "_vars", "_hash")

    def __init__(self, terms=None, vars: Iterable[str] | None = None):
        clean: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for m, c in items:
                mono = make_monomial(m)
                s = clean.get(mono, 0) + _coerce_coeff(c)
                if s:
                    clean[mono] = s
                else:
                    clean.pop(mono, None)
        self._terms = clean
        self._vars = _merge_vars(vars, clean)
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, vars: Sequence[str]) -> "Polynomial":
        # trusted fast path: terms already normalized and covered by vars
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._vars = tuple(vars)
        obj._hash = None
        return obj

    # -- constructors --------------------------------------------------
    @classmethod
    def const(cls, c, vars: Iterable[str] = ()) -> "Polynomial":
        c = _coerce_coeff(c)
        return cls._raw({ONE: c} if c else {}, tuple(vars))

    @classmethod
    def zero(cls, vars: Iterable[str] = ()) -> "Polynomial":
        return cls._raw({}, tuple(vars))

    @classmethod
    def var(cls, name: str, vars: Iterable[str] | None = None) -> "Polynomial":
        return cls({((name, 1),): 1}, vars if vars is not None else (name,))

    @classmethod
    def parse(cls, text: str, vars: Iterable[str] | None = None) -> "Polynomial":
        return parse_polynomial(text, vars)

    # -- basic accessors -----------------------------------------------
    @property
    def vars(self) -> tuple:
        return self._vars

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == ONE for m in self._terms)

    def constant(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(make_monomial(exps), Fraction(0))

    def free_vars(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def degree(self) -> int:
        return max((mono_degree(m) for m in self._terms), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        return max((sum(e for v, e in m if v in names) for m in self._terms), default=-1)

    def with_vars(self, vars: Iterable[str]) -> "Polynomial":
        return Polynomial._raw(self._terms, _merge_vars(vars, self._terms))

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(other, self._vars)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        _dadd(out, other._terms)
        return Polynomial._raw(out, _union_vars(self._vars, other._vars))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()}, self._vars)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        _dadd(out, other._terms, Fraction(-1))
        return Polynomial._raw(out, _union_vars(self._vars, other._vars))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Polynomial.zero(self._vars)
            return Polynomial._raw({m: v * c for m, v in self._terms.items()}, self._vars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial._raw(_dmul(self._terms, other._terms),
                               _union_vars(self._vars, other._vars))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        return Polynomial._raw(_dpow(self._terms, n), self._vars)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({ONE: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and substitution -------------------------------------
    def substitute(self, assignment: Mapping[str, object], partial: bool = False,
                   vars: Iterable[str] | None = None) -> "Polynomial":
        """Simultaneously replace variables by polynomials (or scalars).

        Unassigned variables raise ``MissingVariableError`` unless ``partial``.
        """
        raw = {v: (p._terms if isinstance(p, Polynomial) else ({ONE: Fraction(p)} if p else {}))
               for v, p in assignment.items()}
        deg = self.degree()
        pk = _Packing(_all_names(self._terms, *raw.values()),
                      max(deg, 0) * max([1] + [_max_degree(t) for t in raw.values()]) + max(deg, 0))
        images = {v: pk.scaled(t) for v, t in raw.items()}
        powers: dict = {}
        prefix: dict = {(): (1, {0: 1})}
        by_den: dict = {}
        for m, c in self._terms.items():
            inner = tuple(pe for pe in m if pe[0] in images)
            if len(inner) != len(m) and not partial:
                v = next(pe[0] for pe in m if pe[0] not in images)
                raise MissingVariableError(f"no image for variable {v!r}", variable=v)
            rest = pk.pack(pe for pe in m if pe[0] not in images)
            for j in range(1, len(inner) + 1):
                key = inner[:j]
                if key in prefix:
                    continue
                pe = inner[j - 1]
                if pe not in powers:
                    dv, iv = images[pe[0]]
                    powers[pe] = (dv ** pe[1], _ipow(iv, pe[1]))
                d0, p0 = prefix[inner[:j - 1]]
                d1, p1 = powers[pe]
                prefix[key] = (d0 * d1, _imul(p0, p1))
            dp, poly = prefix[inner]
            acc = by_den.setdefault(dp * c.denominator, {})
            get = acc.get
            num = c.numerator
            for mm, v in poly.items():
                mm += rest
                acc[mm] = get(mm, 0) + num * v
        if len(by_den) == 1:
            (den, acc), = by_den.items()
        else:
            den = lcm(*by_den) if by_den else 1
            acc = {}
            for d, part in by_den.items():
                f = den // d
                for mm, v in part.items():
                    acc[mm] = acc.get(mm, 0) + v * f
        out = pk.unscaled(den, acc)
        if vars is None:
            declared: tuple = ()
            for v, p in assignment.items():
                if isinstance(p, Polynomial):
                    declared = _union_vars(declared, p.vars)
            if partial:
                declared = _union_vars(declared, [v for v in self._vars if v not in images])
            vars = declared
        return Polynomial._raw(out, _merge_vars(vars, out))

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            out[make_monomial([(mapping.get(v, v), e) for v, e in m])] = c
        return Polynomial._raw(out, tuple(mapping.get(v, v) for v in self._vars))

    def derivative(self, var: str, times: int = 1) -> "Polynomial":
        out: dict = {}
        for m, c in self._terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e < times:
                continue
            coeff = c
            for i in range(times):
                coeff *= e - i
            d[var] = e - times
            out[make_monomial(d)] = coeff
        return Polynomial._raw(out, self._vars)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        return self.substitute({v: Fraction(x) for v, x in point.items()}).constant()

    def split(self, names: Iterable[str]) -> dict:
        """Group terms by their monomial in ``names``; values are coefficient polynomials."""
        names = set(names)
        groups: dict = {}
        for m, c in self._terms.items():
            inner = tuple(p for p in m if p[0] in names)
            rest = tuple(p for p in m if p[0] not in names)
            groups.setdefault(inner, {})[rest] = c
        return {k: Polynomial._raw(v, self._vars) for k, v in groups.items()}

    # -- display -------------------------------------------------------
    def sorted_terms(self, order: Sequence[str] | None = None) -> list:
        order = tuple(order or self._vars)
        return sorted(self._terms.items(), key=lambda mc: grevlex_key(mc[0], order),
                      reverse=True)

    def leading_term(self, order: Sequence[str] | None = None):
        if not self._terms:
            return None
        order = tuple(order or self._vars)
        return max(self._terms.items(), key=lambda mc: grevlex_key(mc[0], order))

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"

    def to_json(self) -> dict:
        return {
            "vars": list(self._vars),
            "terms": [{"coeff": _fmt_coeff(c), "exp": dict(m)}
                      for m, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        try:
            terms = [(t.get("exp", {}), Fraction(str(t["coeff"]))) for t in data["terms"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed polynomial JSON: {exc}") from exc
        return cls(terms, data.get("vars"))


def grevlex_key(m: Monomial, order: Sequence[str]):
    d = dict(m)
    e = [d.get(v, 0) for v in order]
    return (sum(e), tuple(-x for x in reversed(e)))


def variables_union(polys: Iterable[Polynomial]) -> tuple:
    out: tuple = ()
    for p in polys:
        out = _union_vars(out, p.vars)
    return out


# -- text grammar -------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(m: Monomial, order: Sequence[str]) -> str:
    pos = {v: i for i, v in enumerate(order)}
    parts = []
    for v, e in sorted(m, key=lambda p: (pos.get(p[0], len(pos)), natural_key(p[0]))):
        parts.append(v if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _fmt_mono(m, p.vars)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if i == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


def parse_polynomial(text: str, vars: Iterable[str] | None = None) -> Polynomial:
    """Parse ``3/2*x^2*y - z + 4`` style expressions."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if not mt:
            break
        tokens.append((mt.group(1), mt.group(2), mt.group(3)))
        pos = mt.end()
    if not tokens:
        raise ParseError("empty polynomial expression")

    i = 0
    terms: list = []

    def peek_op():
        return tokens[i][2] if i < len(tokens) else None

    def parse_factor():
        nonlocal i
        if i >= len(tokens):
            raise ParseError(f"unexpected end of expression in {text!r}")
        num, name, op = tokens[i]
        i += 1
        if num is not None:
            n, _, d = num.partition("/")
            if d and int(d) == 0:
                raise ParseError(f"zero denominator in {text!r}")
            return Fraction(int(n), int(d) if d else 1), ()
        if name is not None:
            exp = 1
            if peek_op() == "^":
                i += 1
                if i >= len(tokens) or tokens[i][0] is None or "/" in tokens[i][0]:
                    raise ParseError(f"expected integer exponent after {name!r} in {text!r}")
                exp = int(tokens[i][0])
                i += 1
            return Fraction(1), ((name, exp),)
        raise ParseError(f"unexpected {op!r} in {text!r}")

    sign = 1
    if peek_op() is not None and peek_op() in "+-":
        sign = -1 if peek_op() == "-" else 1
        i += 1
    while True:
        coeff, mono = parse_factor()
        while peek_op() == "*":
            i += 1
            c2, m2 = parse_factor()
            coeff *= c2
            mono = mono_mul(make_monomial(mono), make_monomial(m2))
        terms.append((make_monomial(mono), sign * coeff))
        op = peek_op()
        if op is None:
            break
        if op not in "+-":
            raise ParseError(f"unexpected {op!r} in {text!r}")
        sign = -1 if op == "-" else 1
        i += 1
    return Polynomial(terms, vars)


# -- Groebner bases -----------------------------------------------------
# Dense internals: exponent tuples aligned with an explicit variable order.

def _gkey(e: tuple):
    return (sum(e), tuple(-x for x in reversed(e)))


def _to_dense(p: Polynomial, order: Sequence[str]) -> dict:
    idx = {v: i for i, v in enumerate(order)}
    out = {}
    for m, c in p.items():
        e = [0] * len(order)
        for v, x in m:
            if v not in idx:
                raise MissingVariableError(f"variable {v!r} outside the ring {tuple(order)}",
                                           variable=v)
            e[idx[v]] = x
        out[tuple(e)] = c
    return out


def _from_dense(d: dict, order: Sequence[str]) -> Polynomial:
    terms = {tuple((v, x) for v, x in sorted(zip(order, e)) if x): c for e, c in d.items()}
    return Polynomial._raw(terms, tuple(order))


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _esub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _eadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _lead(d: dict) -> tuple:
    return max(d, key=_gkey)


def _divide_dense(p: dict, basis: list) -> tuple:
    """Multivariate division of dense ``p`` by monic ``basis`` entries ``(poly, lm)``."""
    p = dict(p)
    quotients = [dict() for _ in basis]
    rem: dict = {}
    heap = [(_neg_key(e), e) for e in p]
    heapq.heapify(heap)
    while heap:
        _, e = heapq.heappop(heap)
        c = p.pop(e, None)
        if c is None:
            continue
        for k, (g, lm) in enumerate(basis):
            if _divides(lm, e):
                shift = _esub(e, lm)
                quotients[k][shift] = quotients[k].get(shift, 0) + c
                for ge, gc in g.items():
                    if ge == lm:
                        continue
                    t = _eadd(ge, shift)
                    s = p.get(t, 0) - c * gc
                    if s:
                        if t not in p:
                            heapq.heappush(heap, (_neg_key(t), t))
                        p[t] = s
                    else:
                        p.pop(t, None)
                break
        else:
            rem[e] = c
    return quotients, rem


def _neg_key(e):
    return (-sum(e), tuple(reversed(e)))


def _dense_mul_mono(d: dict, shift: tuple, c) -> dict:
    return {_eadd(e, shift): v * c for e, v in d.items()}


def _dense_add(acc: dict, other: dict, scale=1) -> None:
    for e, v in other.items():
        s = acc.get(e, 0) + v * scale
        if s:
            acc[e] = s
        else:
            acc.pop(e, None)


def _dense_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _eadd(ea, eb)
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _combine(cofs: list, quotients: list, base: list, n: int) -> list:
    """``base - sum_k quotients[k] * cofs[k]`` on cofactor vectors of length ``n``."""
    out = [dict(b) for b in base]
    for q, cof in zip(quotients, cofs):
        if not q:
            continue
        for i in range(n):
            if cof[i]:
                _dense_add(out[i], _dense_mul(q, cof[i]), -1)
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis under grevlex on ``order``, with cofactors.

    ``basis[j] == sum(cofactors[j][i] * generators[i])`` holds exactly.
    """

    order: tuple
    generators: tuple
    basis: tuple
    cofactors: tuple
    _dense: list = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        dense = []
        for b in self.basis:
            d = _to_dense(b, self.order)
            dense.append((d, _lead(d)))
        object.__setattr__(self, "_dense", dense)

    @property
    def leading_monomials(self) -> list:
        return [lm for _, lm in self._dense]

    def is_unit(self) -> bool:
        return any(not any(lm) for lm in self.leading_monomials)


def _pair_cap(pair_cap: int | None) -> int:
    if pair_cap is not None:
        return pair_cap
    env = os.environ.get("JETKERNEL_PAIR_CAP")
    return int(env) if env else DEFAULT_PAIR_CAP


def buchberger(generators: Sequence[Polynomial], order: Sequence[str] | None = None,
               pair_cap: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    Cofactors are tracked through every S-polynomial reduction so that each
    basis element is an explicit combination of the given generators.
    """
    generators = tuple(generators)
    order = tuple(order) if order is not None else variables_union(generators)
    cap = _pair_cap(pair_cap)
    n = len(generators)
    zero_e = (0,) * len(order)

    polys: list = []   # (dense, lm)
    cofs: list = []    # list of n dense cofactors
    for i, h in enumerate(generators):
        d = _to_dense(h, order)
        if not d:
            continue
        lm = _lead(d)
        inv = 1 / d[lm]
        polys.append(({e: c * inv for e, c in d.items()}, lm))
        cof = [dict() for _ in range(n)]
        cof[i] = {zero_e: inv}
        cofs.append(cof)

    heap: list = []
    created = 0

    def add_pairs(j):
        nonlocal created
        for i in range(j):
            lcm = tuple(max(a, b) for a, b in zip(polys[i][1], polys[j][1]))
            created += 1
            if created > cap:
                raise ResourceLimitError(f"Buchberger pair queue exceeded cap {cap}", cap=cap)
            heapq.heappush(heap, (_gkey(lcm), i, j, lcm))

    for j in range(len(polys)):
        add_pairs(j)

    while heap:
        _, i, j, lcm = heapq.heappop(heap)
        (gi, lmi), (gj, lmj) = polys[i], polys[j]
        if _eadd(lmi, lmj) == lcm:
            continue  # coprime leading monomials
        si, sj = _esub(lcm, lmi), _esub(lcm, lmj)
        s = _dense_mul_mono(gi, si, 1)
        _dense_add(s, _dense_mul_mono(gj, sj, 1), -1)
        scof = [_dense_mul_mono(cofs[i][k], si, 1) for k in range(n)]
        for k in range(n):
            _dense_add(scof[k], _dense_mul_mono(cofs[j][k], sj, 1), -1)
        quotients, rem = _divide_dense(s, polys)
        if not rem:
            continue
        rcof = _combine(cofs, quotients, scof, n)
        lm = _lead(rem)
        inv = 1 / rem[lm]
        polys.append(({e: c * inv for e, c in rem.items()}, lm))
        cofs.append([{e: c * inv for e, c in r.items()} for r in rcof])
        add_pairs(len(polys) - 1)

    # minimalize: drop elements whose leading monomial is divisible by another's
    keep = []
    for a, (_, lma) in enumerate(polys):
        redundant = any(
            b != a and _divides(lmb, lma) and (lmb != lma or b < a)
            for b, (_, lmb) in enumerate(polys))
        if not redundant:
            keep.append(a)

    basis, cof_rows = [], []
    for a in keep:
        g, lm = polys[a]
        others = [polys[b] for b in keep if b != a]
        tail = {e: c for e, c in g.items() if e != lm}
        quotients, rem = _divide_dense(tail, others)
        rem[lm] = Fraction(1)
        rcof = _combine([cofs[b] for b in keep if b != a], quotients, cofs[a], n)
        basis.append(_from_dense(rem, order))
        cof_rows.append(tuple(_from_dense(c, order) for c in rcof))
    return GroebnerBasis(order, generators, tuple(basis), tuple(cof_rows))


def divide(p: Polynomial, gb: GroebnerBasis) -> tuple:
    """Divide ``p`` by the basis; returns ``(quotients, remainder)``.

    Variables of ``p`` outside ``gb.order`` are treated as coefficients
    (block order with the basis variables dominant).
    """
    order = gb.order
    inner = set(order)
    # split p into {dense exponent in basis vars: coefficient term dict}
    p_split: dict = {}
    idx = {v: i for i, v in enumerate(order)}
    for m, c in p.items():
        e = [0] * len(order)
        rest = []
        for v, x in m:
            if v in inner:
                e[idx[v]] = x
            else:
                rest.append((v, x))
        key = tuple(e)
        coeff = p_split.setdefault(key, {})
        coeff[tuple(rest)] = coeff.get(tuple(rest), 0) + c

    basis = gb._dense
    quotients: list = [dict() for _ in basis]
    rem: dict = {}
    heap = [(_neg_key(e), e) for e in p_split]
    heapq.heapify(heap)
    while heap:
        _, e = heapq.heappop(heap)
        c = p_split.pop(e, None)
        if c is None:
            continue
        for k, (g, lm) in enumerate(basis):
            if _divides(lm, e):
                shift = _esub(e, lm)
                q = quotients[k].setdefault(shift, {})
                _dadd(q, c)
                if not q:
                    del quotients[k][shift]
                for ge, gc in g.items():
                    if ge == lm:
                        continue
                    t = _eadd(ge, shift)
                    acc = p_split.get(t)
                    if acc is None:
                        acc = {}
                        heapq.heappush(heap, (_neg_key(t), t))
                    _dadd(acc, c, -gc)
                    if acc:
                        p_split[t] = acc
                    else:
                        p_split.pop(t, None)
                break
        else:
            rem[e] = c

    vars_out = _union_vars(order, p.vars)

    def assemble(split: dict) -> Polynomial:
        terms: dict = {}
        for e, coeff in split.items():
            inner_m = tuple((v, x) for v, x in zip(order, e) if x)
            for rest, c in coeff.items():
                terms[mono_mul(make_monomial(inner_m), rest)] = c
        return Polynomial._raw(terms, vars_out)

    return [assemble(q) for q in quotients], assemble(rem)


def reduce(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return divide(p, gb)[1]


def standard_monomials(gb: GroebnerBasis, max_degree: int) -> list:
    """Monomials of degree <= max_degree not divisible by any leading monomial."""
    lms = gb.leading_monomials
    out = []
    for e in monomials_up_to(len(gb.order), max_degree):
        if not any(_divides(lm, e) for lm in lms):
            out.append(tuple((v, x) for v, x in sorted(zip(gb.order, e)) if x))
    return out


def monomials_up_to(nvars: int, max_degree: int) -> list:
    """Dense exponent tuples of total degree <= max_degree, ascending in grevlex."""
    out = []
    for deg in range(max_degree + 1):
        out.extend(monomials_of_degree(nvars, deg))
    return sorted(out, key=_gkey)


def monomials_of_degree(nvars: int, deg: int) -> list:
    if nvars == 0:
        return [()] if deg == 0 else []
    if nvars == 1:
        return [(deg,)]
    out = []
    for first in range(deg, -1, -1):
        for rest in monomials_of_degree(nvars - 1, deg - first):
            out.append((first,) + rest)
    return out
