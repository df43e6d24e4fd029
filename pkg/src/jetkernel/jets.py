"""Jets of sections of trivial fibrations R^n x R^m -> R^n, and truncated pro-plots.

Fiber coordinates ``u^a_sigma`` are ordered by ``|sigma|`` first, so the
coordinates of ``J^(k-1)`` are a prefix of those of ``J^k`` and every
projection in the tower is a prefix truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb, factorial, prod

from .errors import IncompatibleConeError, ShapeError, VerificationError
from .factorization import FactorizationPair, composite, lift_plot
from .formal import FormalMorphism, FormalSpace
from .polyring import Polynomial, make_monomial, monomials_of_degree, natural_key
from .weil import WeilAlgebra, WeilElement, disk, normal_form


def multi_indices(n: int, k: int) -> list:
    out = []
    for deg in range(k + 1):
        out.extend(monomials_of_degree(n, deg))
    return out


def fiber_count(n: int, m: int, k: int) -> int:
    return m * comb(n + k, n)


def jet_dim(n: int, m: int, k: int) -> int:
    """Dimension ``n + m*C(n+k, n)`` of the jet space of order ``k``."""
    return n + fiber_count(n, m, k)


def jet_dims(n: int, m: int, K: int) -> list:
    return [jet_dim(n, m, k) for k in range(K + 1)]


@dataclass(frozen=True)
class JetSpace:
    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.k < 0:
            raise ShapeError("jet space parameters must be non-negative")

    @cached_property
    def fiber(self) -> tuple:
        """``(a, sigma)`` pairs in coordinate order, ``a`` counted from 1."""
        return tuple((a, s) for s in multi_indices(self.n, self.k)
                     for a in range(1, self.m + 1))

    @property
    def base_names(self) -> tuple:
        return tuple(f"x{i}" for i in range(1, self.n + 1))

    def coordinate_name(self, a: int, sigma) -> str:
        return f"u{a}_" + "_".join(str(s) for s in sigma) if self.n else f"u{a}"

    def key(self, a: int, sigma) -> str:
        head = "u" if self.m == 1 else f"u{a}"
        return head + "[" + ",".join(str(s) for s in sigma) + "]"

    @property
    def coords(self) -> tuple:
        return self.base_names + tuple(self.coordinate_name(a, s) for a, s in self.fiber)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def space(self) -> FormalSpace:
        return FormalSpace.cartesian(self.coords, name=f"J{self.k}")

    def lower(self) -> "JetSpace":
        if self.k == 0:
            raise ShapeError("order-0 jets have no lower projection")
        return JetSpace(self.n, self.m, self.k - 1)


@dataclass(frozen=True)
class JetPoint:
    space: JetSpace
    base: tuple
    values: tuple   # fiber entries in ``space.fiber`` order

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(Fraction(b) for b in self.base))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if len(self.base) != self.space.n:
            raise ShapeError(f"base point has {len(self.base)} coordinates, expected {self.space.n}")
        if len(self.values) != len(self.space.fiber):
            raise ShapeError(f"{len(self.values)} jet entries, expected {len(self.space.fiber)}")

    def value(self, a: int, sigma) -> Fraction:
        return self.values[self.space.fiber.index((a, tuple(sigma)))]

    def to_json(self) -> dict:
        sp = self.space
        return {
            "n": sp.n, "m": sp.m, "k": sp.k,
            "base": [str(b) for b in self.base],
            "values": {sp.key(a, s): str(v) for (a, s), v in zip(sp.fiber, self.values)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "JetPoint":
        sp = JetSpace(int(data["n"]), int(data["m"]), int(data["k"]))
        vals = data["values"]
        missing = [sp.key(a, s) for a, s in sp.fiber if sp.key(a, s) not in vals]
        if missing:
            raise ShapeError(f"jet point is missing entries {missing}")
        extra = set(vals) - {sp.key(a, s) for a, s in sp.fiber}
        if extra:
            raise ShapeError(f"unknown jet entries {sorted(extra)}")
        return cls(sp, tuple(Fraction(b) for b in data.get("base", [0] * sp.n)),
                   tuple(Fraction(vals[sp.key(a, s)]) for a, s in sp.fiber))


def _base_vars(sections, n, base_vars):
    if base_vars is not None:
        base_vars = tuple(base_vars)
        if len(base_vars) != n:
            raise ShapeError(f"expected {n} base variables, got {base_vars}")
        return base_vars
    used = sorted(set().union(*(s.free_vars() for s in sections)) if sections else set(),
                  key=natural_key)
    if len(used) == n:
        return tuple(used)
    if not used or len(used) < n:
        fallback = tuple(f"x{i}" for i in range(1, n + 1))
        if set(used) <= set(fallback):
            return fallback
    raise ShapeError(f"cannot match section variables {used} to a base of dimension {n}; "
                     "pass base variables explicitly")


def prolong(sections, k: int, base, base_vars=None) -> JetPoint:
    """All partial derivatives of order <= k of the sections, evaluated at ``base``."""
    if k < 0:
        raise ShapeError("jet order must be non-negative")
    sections = [s if isinstance(s, Polynomial) else Polynomial.parse(str(s)) for s in sections]
    base = tuple(Fraction(b) for b in base)
    n, m = len(base), len(sections)
    names = _base_vars(sections, n, base_vars)
    stray = set().union(*(s.free_vars() for s in sections)) - set(names) if sections else set()
    if stray:
        raise ShapeError(f"sections use variables {sorted(stray)} outside the base")
    sp = JetSpace(n, m, k)
    point = dict(zip(names, base))
    cache: dict = {}

    def deriv(a, sigma):
        key = (a, sigma)
        if key not in cache:
            if not any(sigma):
                cache[key] = sections[a - 1]
            else:
                i = max(j for j, s in enumerate(sigma) if s)
                lower = sigma[:i] + (sigma[i] - 1,) + sigma[i + 1:]
                cache[key] = deriv(a, lower).derivative(names[i])
        return cache[key]

    values = [deriv(a, s).substitute(point, partial=True).constant() for a, s in sp.fiber]
    return JetPoint(sp, base, tuple(values))


def project(p: JetPoint) -> JetPoint:
    """Forget the entries of top order."""
    lower = p.space.lower()
    return JetPoint(lower, p.base, p.values[:len(lower.fiber)])


def disk_section_to_jet(sections, algebra: WeilAlgebra | None = None) -> JetPoint:
    """Jet at the origin encoded by sections over the disk: ``u^a_sigma = sigma! * coeff``."""
    sections = list(sections)
    if algebra is None:
        if not sections:
            raise ShapeError("cannot infer the disk from an empty section list")
        algebra = sections[0].algebra
    for s in sections:
        if not isinstance(s, WeilElement) or s.algebra != algebra:
            raise ShapeError("sections must be elements of one disk algebra")
    n, k = algebra.d, algebra.k
    if algebra.dim != comb(n + k, n):
        raise ShapeError(f"{algebra!r} is not an infinitesimal disk")
    sp = JetSpace(n, len(sections), k)
    vals = []
    for a, sigma in sp.fiber:
        c = sections[a - 1].value.coefficient(dict(zip(algebra.vars, sigma)))
        vals.append(c * prod(factorial(s) for s in sigma))
    return JetPoint(sp, (0,) * n, tuple(vals))


def jet_to_disk_section(p: JetPoint, algebra: WeilAlgebra | None = None) -> list:
    """Inverse of :func:`disk_section_to_jet` (the base point is not recorded in the section)."""
    sp = p.space
    A = algebra if algebra is not None else disk(sp.n, sp.k)
    if A.d != sp.n or A.k != sp.k:
        raise ShapeError(f"{A!r} does not match jets of order {sp.k} in {sp.n} variables")
    terms: list = [dict() for _ in range(sp.m)]
    for (a, sigma), v in zip(sp.fiber, p.values):
        if v:
            terms[a - 1][make_monomial(zip(A.vars, sigma))] = v / prod(factorial(s) for s in sigma)
    return [normal_form(Polynomial(t, A.vars), A) for t in terms]


# -- truncated towers ------------------------------------------------------

@dataclass(frozen=True)
class TruncatedProPlot:
    """Plots ``levels[k]: source -> T_k`` for ``k = 0..K`` into a prefix tower ``T_0 <- T_1 <- ...``."""

    source: FormalSpace
    levels: tuple

    @property
    def K(self) -> int:
        return len(self.levels) - 1

    @property
    def dims(self) -> list:
        return [lv.target.dim for lv in self.levels]

    def check(self) -> None:
        for k in range(1, len(self.levels)):
            lo, hi = self.levels[k - 1], self.levels[k]
            d = lo.target.dim
            if hi.source != self.source or lo.source != self.source:
                raise ShapeError(f"level {k} has a different source")
            if hi.target.coords[:d] != lo.target.coords or hi.target.dim < d:
                raise IncompatibleConeError(f"level {k} target does not project onto level {k - 1}",
                                            level=k)
            if any(a != b for a, b in zip(hi.components[:d], lo.components)):
                raise IncompatibleConeError(
                    f"projecting the level-{k} plot does not give the level-{k - 1} plot", level=k)


def tower_family(source: FormalSpace, tower_coords, components) -> TruncatedProPlot:
    """Family whose level ``k`` is the first ``len(tower_coords[k])`` of ``components[k]``."""
    levels = []
    for names, comps in zip(tower_coords, components):
        tgt = FormalSpace.cartesian(names)
        levels.append(FormalMorphism(source, tgt, tuple(comps)))
    return TruncatedProPlot(source, tuple(levels))


def rinf_coords(K: int, prefix: str = "y") -> list:
    return [tuple(f"{prefix}{i}" for i in range(1, k + 1)) for k in range(K + 1)]


def jet_coords(n: int, m: int, K: int) -> list:
    return [JetSpace(n, m, k).coords for k in range(K + 1)]


def cone_to_plot(family: TruncatedProPlot) -> FormalMorphism:
    family.check()
    return family.levels[-1]


def plot_to_cone(plot: FormalMorphism, dims=None) -> TruncatedProPlot:
    """Split a plot into its prefix truncations (default: every prefix length)."""
    D = plot.target.dim
    dims = list(dims) if dims is not None else list(range(D + 1))
    if not dims or dims[-1] != D or any(a > b for a, b in zip(dims, dims[1:])):
        raise ShapeError(f"dims {dims} do not form a tower ending at {D}")
    names = plot.target.coords
    return tower_family(plot.source, [names[:d] for d in dims],
                        [plot.components[:d] for d in dims])


@dataclass(frozen=True)
class JetLift:
    pair: FactorizationPair
    family: TruncatedProPlot
    verification: dict


def lift_jet_plot(family: TruncatedProPlot) -> JetLift:
    """Factor a compatible jet family through ``U x R^d`` and check every level."""
    plot = cone_to_plot(family)
    pair = lift_plot(plot)
    comp = composite(pair).components
    record = {}
    for k, lv in enumerate(family.levels):
        if any(a != b for a, b in zip(comp[:lv.target.dim], lv.components)):
            raise VerificationError(f"lifted composite differs at level {k}",
                                    identity=f"composite = plot at level {k}")
        record[f"level {k}"] = "exact"
    return JetLift(pair, family, record)
