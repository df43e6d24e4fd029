"""Formal Cartesian spaces U x D and their morphisms as coordinate pullbacks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    ShapeError,
    TypeMismatchError,
    UndecidableInputError,
    VerificationError,
)
from .linalg import Span, complete_columns, generic_rank, inverse, rank
from .polyring import Polynomial
from .weil import POINT, WeilAlgebra, WeilElement, normal_form


@dataclass(frozen=True)
class FormalSpace:
    """``U x D`` with ``U = R^q`` coordinatized by ``params``."""

    params: tuple
    thickening: WeilAlgebra = POINT
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ShapeError(f"duplicate coordinate names in {self.params}")
        clash = set(self.params) & set(self.thickening.vars)
        if clash:
            raise ShapeError(f"parameter and infinitesimal coordinates overlap: {sorted(clash)}")

    @classmethod
    def cartesian(cls, names: Iterable[str], name: str = "") -> "FormalSpace":
        return cls(tuple(names), POINT, name)

    @property
    def eps(self) -> tuple:
        return self.thickening.vars

    @property
    def coords(self) -> tuple:
        return self.params + self.thickening.vars

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_cartesian(self) -> bool:
        return self.thickening.is_point()

    def coordinate(self, name: str) -> Polynomial:
        return Polynomial.var(name, self.coords)

    def __repr__(self):
        label = self.name or "FormalSpace"
        thick = f" x {self.thickening.name or repr(self.thickening)}" if self.eps else ""
        return f"<{label} R^{len(self.params)}({','.join(self.params)}){thick}>"


def cartesian_block(prefix: str, n: int) -> tuple:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def _as_poly(c, coords) -> Polynomial:
    if isinstance(c, Polynomial):
        return c
    if isinstance(c, WeilElement):
        return c.value
    if isinstance(c, str):
        return Polynomial.parse(c, coords)
    return Polynomial.const(c, coords)


@dataclass(frozen=True)
class FormalMorphism:
    """A map ``source -> target`` given by the pullbacks of the target coordinates.

    Components are stored in normal form of the source algebra and checked for
    well-definedness (target ideal generators pull back to zero).
    """

    source: FormalSpace
    target: FormalSpace
    components: tuple

    def __post_init__(self):
        src = self.source
        comps = tuple(normal_form(_as_poly(c, src.coords), src.thickening).value.with_vars(src.coords)
                      for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.target.dim:
            raise ShapeError(f"{len(comps)} components for a target of dimension {self.target.dim}")
        allowed = set(src.coords)
        for c in comps:
            stray = c.free_vars() - allowed
            if stray:
                raise TypeMismatchError(f"component {c} uses non-source variables {sorted(stray)}")
        tgt = self.target
        if tgt.eps:
            q = len(tgt.params)
            zero_eps = {v: 0 for v in src.eps}
            for v, c in zip(tgt.eps, comps[q:]):
                if not c.substitute(zero_eps, partial=True).is_zero():
                    raise ShapeError(f"component for infinitesimal coordinate {v} is not nilpotent")
            images = dict(zip(tgt.eps, comps[q:]))
            for h in tgt.thickening.generators:
                if not normal_form(h.substitute(images), src.thickening).is_zero():
                    raise ShapeError(f"target relation {h} does not pull back to zero")

    @property
    def assignment(self) -> dict:
        return dict(zip(self.target.coords, self.components))

    def pullback(self, p: Polynomial) -> Polynomial:
        """Pull a function on the target back along this map (normal form on the source)."""
        return normal_form(p.substitute(self.assignment, vars=self.source.coords),
                           self.source.thickening).value.with_vars(self.source.coords)

    def elements(self) -> list:
        return [WeilElement(self.source.thickening, c) for c in self.components]

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"<{self.source!r} -> {self.target!r}: ({comps})>"


def identity(space: FormalSpace) -> FormalMorphism:
    return FormalMorphism(space, space, tuple(space.coordinate(v) for v in space.coords))


def compose(g: FormalMorphism, f: FormalMorphism) -> FormalMorphism:
    """``g o f``: substitute ``f``'s components into ``g``'s."""
    if f.target != g.source:
        raise TypeMismatchError(f"cannot compose: {f.target!r} is not {g.source!r}")
    return FormalMorphism(f.source, g.target, tuple(f.pullback(c) for c in g.components))


def morphism_equal(a: FormalMorphism, b: FormalMorphism) -> bool:
    return (a.source == b.source and a.target == b.target
            and all(x == y for x, y in zip(a.components, b.components)))


# -- monomorphism and embedding predicates -------------------------------

def is_mono_point(iota: FormalMorphism) -> bool:
    """Whether a map out of a pure thickened point is a monomorphism.

    Decided by growing the subalgebra generated by the component images until
    it stabilizes and comparing its dimension with that of the algebra.
    """
    if iota.source.params:
        raise ShapeError("is_mono_point expects a source without parameter coordinates")
    A = iota.source.thickening
    if A.dim == 1:
        return True
    gens = iota.elements()
    one = normal_form(Polynomial.const(1), A)
    span = Span(A.dim)
    span.add(one.coordinates())
    queue = [one]
    while queue:
        v = queue.pop()
        for g in gens:
            w = v * g
            if span.add(w.coordinates()):
                if span.dim == A.dim:
                    return True
                queue.append(w)
    return span.dim == A.dim


def _linear_eps_rows(iota: FormalMorphism) -> list:
    A = iota.source.thickening
    rows = []
    for c in iota.components:
        groups = c.split(A.vars)
        rows.append([groups.get(((v, 1),), Polynomial.zero()) for v in A.vars])
    return rows


def _relation_rows(A: WeilAlgebra) -> list:
    return [[h.coefficient({v: 1}) for v in A.vars] for h in A.generators]


def fiber_mono_everywhere(iota: FormalMorphism) -> bool:
    """Whether every restriction ``{u} x D -> target`` is a monomorphism.

    Uses the cotangent criterion: the linear parts of the components must span
    m/m^2.  Answers only when the answer does not depend on ``u``.
    """
    A = iota.source.thickening
    if A.d == 0:
        return True
    rel = _relation_rows(A)
    rows = _linear_eps_rows(iota)
    const_rows = [[x.constant() for x in r] for r in rows if all(x.is_constant() for x in r)]
    if rank(rel + const_rows) == A.d:
        return True
    if generic_rank(rel + rows) < A.d:
        return False
    raise UndecidableInputError("fiber monomorphism condition depends on the parameters")


def _parameter_part(iota: FormalMorphism) -> list:
    zero_eps = {v: 0 for v in iota.source.eps}
    q = len(iota.target.params)
    return [c.substitute(zero_eps, partial=True) for c in iota.components[:q]]


def is_formal_embedding(iota: FormalMorphism) -> bool:
    """Embedding on ``U x {0}`` plus monomorphism on every fiber.

    Only affine-linear parameter parts are decided; anything else raises
    ``UndecidableInputError``.
    """
    params = iota.source.params
    part = _parameter_part(iota)
    for c in part:
        if c.degree() > 1:
            raise UndecidableInputError(f"parameter part {c} is not affine-linear")
    if params:
        lin = [[c.coefficient({u: 1}) for u in params] for c in part]
        if rank(lin) < len(params):
            return False
    return fiber_mono_everywhere(iota)


def is_rectified(iota: FormalMorphism) -> bool:
    src, tgt = iota.source, iota.target
    if not tgt.is_cartesian() or tgt.dim < src.dim:
        return False
    expected = [src.coordinate(v) for v in src.coords]
    comps = iota.components
    return (all(c == e for c, e in zip(comps, expected))
            and all(c.is_zero() for c in comps[src.dim:]))


@dataclass(frozen=True)
class EmbeddingForm:
    morphism: FormalMorphism
    kind: str  # "general" | "mono_at_point" | "rectified"
    proper: bool = False


def classify_embedding(iota: FormalMorphism) -> EmbeddingForm:
    if is_rectified(iota):
        return EmbeddingForm(iota, "rectified", proper=True)
    if not iota.source.params and iota.target.is_cartesian() and is_mono_point(iota):
        return EmbeddingForm(iota, "mono_at_point", proper=True)
    return EmbeddingForm(iota, "general", proper=False)


def rectified_inclusion(source: FormalSpace, target: FormalSpace) -> FormalMorphism:
    comps = [source.coordinate(v) for v in source.coords]
    comps += [Polynomial.zero(source.coords)] * (target.dim - source.dim)
    return FormalMorphism(source, target, tuple(comps))


# -- rectification --------------------------------------------------------

def _affine_parts(iota: FormalMorphism):
    src = iota.source
    cols = src.coords
    L, b = [], []
    for c in iota.components:
        if c.degree() > 1:
            raise ShapeError(f"component {c} is not affine-linear")
        L.append([c.coefficient({v: 1}) for v in cols])
        b.append(c.constant())
    return L, b


def linear_map(source: FormalSpace, target: FormalSpace, matrix, offset=None) -> FormalMorphism:
    """The affine map ``y -> matrix @ y + offset`` between Cartesian spaces."""
    ys = [source.coordinate(v) for v in source.coords]
    comps = []
    for i, row in enumerate(matrix):
        acc = Polynomial.const(offset[i] if offset else 0, source.coords)
        for a, y in zip(row, ys):
            if a:
                acc = acc + y * a
        comps.append(acc)
    return FormalMorphism(source, target, tuple(comps))


def rectify_affine(iota: FormalMorphism) -> tuple:
    """Affine change of target coordinates putting ``iota`` in standard position.

    Returns ``(diffeo, inverse)`` with ``compose(diffeo, iota)`` rectified.
    """
    tgt = iota.target
    if not tgt.is_cartesian():
        raise ShapeError("rectify_affine needs a Cartesian target")
    L, b = _affine_parts(iota)
    n = tgt.dim
    cols = [[L[j][s] for j in range(n)] for s in range(iota.source.dim)]
    M = complete_columns(cols, n)
    Minv = inverse(M)
    shift = [-sum(Minv[i][j] * b[j] for j in range(n)) for i in range(n)]
    diffeo = linear_map(tgt, tgt, Minv, shift)
    inv = linear_map(tgt, tgt, M, b)
    if not is_rectified(compose(diffeo, iota)):
        raise VerificationError("affine rectification failed", identity="diffeo∘iota = (u, eps, 0)")
    return diffeo, inv


def _check_embedded_shape(iota: FormalMorphism) -> int:
    src, tgt = iota.source, iota.target
    if not tgt.is_cartesian():
        raise ShapeError("shear_rectify needs a Cartesian target V x U x R^d")
    p = tgt.dim - src.dim
    if p < 0:
        raise ShapeError("target too small for the (i, u, eps) shape")
    tail = iota.components[p:]
    if any(c != src.coordinate(v) for c, v in zip(tail, src.coords)):
        raise ShapeError("morphism is not of the shape (i, u, eps)")
    return p


def reorder_parts(iota: FormalMorphism) -> tuple:
    """Permutation ``V x U x R^d -> U x R^d x V`` and its inverse for an embedded map."""
    p = _check_embedded_shape(iota)
    tgt = iota.target
    names = tgt.params[p:] + tgt.params[:p]
    R = FormalSpace.cartesian(names, name=f"{tgt.name}~" if tgt.name else "")
    perm = FormalMorphism(tgt, R, tuple(tgt.coordinate(v) for v in names))
    perm_inv = FormalMorphism(R, tgt, tuple(R.coordinate(v) for v in tgt.params))
    return perm, perm_inv


def shear_parts(iota_perm: FormalMorphism, p: int) -> tuple:
    """Polynomial shear of ``U x R^d x V`` straightening ``(u, eps, i)`` to ``(u, eps, 0)``."""
    src, R = iota_perm.source, iota_perm.target
    m = src.dim
    rename = dict(zip(src.coords, R.params[:m]))
    lifts = [c.rename(rename).with_vars(R.coords) for c in iota_perm.components[m:]]
    head = tuple(R.coordinate(v) for v in R.params[:m])
    vs = [R.coordinate(v) for v in R.params[m:]]
    shear = FormalMorphism(R, R, head + tuple(v - l for v, l in zip(vs, lifts)))
    shear_inv = FormalMorphism(R, R, head + tuple(v + l for v, l in zip(vs, lifts)))
    return shear, shear_inv


def shear_rectify(iota: FormalMorphism) -> tuple:
    """Rectify an embedded map of shape ``(i, u, eps)`` into ``V x U x R^d``.

    Returns ``(diffeo, inverse, iota_r)`` where ``diffeo: V x U x R^d -> U x R^d x V``
    is ``(v, u, t) -> (u, t, v - lift(u, t))``, ``inverse`` is
    ``(u, t, v) -> (v + lift(u, t), u, t)`` and ``iota_r = (u, eps, 0)``.
    """
    p = _check_embedded_shape(iota)
    perm, perm_inv = reorder_parts(iota)
    iota_perm = compose(perm, iota)
    shear, shear_inv = shear_parts(iota_perm, p)
    diffeo = compose(shear, perm)
    inv = compose(perm_inv, shear_inv)
    iota_r = compose(diffeo, iota)
    if not is_rectified(iota_r):
        raise VerificationError("shear rectification failed", identity="diffeo∘iota = (u, eps, 0)")
    if not morphism_equal(compose(inv, iota_r), iota):
        raise VerificationError("shear inverse failed", identity="inverse∘iota_r = iota")
    return diffeo, inv, iota_r
