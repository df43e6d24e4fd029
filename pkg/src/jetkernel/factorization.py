"""Factorizations of plots through Cartesian spaces and their zig-zag equivalence.

A plot of ``U x D`` into the truncation ``R^K`` of ``R^infinity`` is presented
as a pair ``(iota, f)`` with ``iota: U x D -> V`` and ``f: V -> R^K``.  Two pairs
with equal composites are connected by an explicit chain of relation steps;
the central step goes through a witness span ``(W, alpha, alpha', phi)``.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field

from .errors import (
    NotMonoError,
    NotRectifiedError,
    ShapeError,
    TypeMismatchError,
    VerificationError,
)
from .formal import (
    FormalMorphism,
    FormalSpace,
    cartesian_block,
    compose,
    is_mono_point,
    is_rectified,
    rectify_affine,
    reorder_parts,
    shear_parts,
)
from .hadamard import vanishing_quotient
from .polyring import Polynomial
from .weil import ideal_decompose

_FAULT: contextvars.ContextVar = contextvars.ContextVar("jetkernel_fault", default=None)


@contextlib.contextmanager
def inject_fault(name: str | None):
    """Test hook: ``"perturb-phi"`` corrupts every witness map before verification."""
    token = _FAULT.set(name)
    try:
        yield
    finally:
        _FAULT.reset(token)


def _same_components(a: FormalMorphism, b: FormalMorphism) -> bool:
    return (a.source == b.source and len(a.components) == len(b.components)
            and all(x == y for x, y in zip(a.components, b.components)))


@dataclass(frozen=True)
class FactorizationPair:
    iota: FormalMorphism
    f: FormalMorphism

    def __post_init__(self):
        if self.iota.target != self.f.source:
            raise TypeMismatchError("iota's target is not f's source")
        if not self.iota.target.is_cartesian() or not self.f.target.is_cartesian():
            raise ShapeError("factorizations go through Cartesian spaces into R^K")

    @property
    def source(self) -> FormalSpace:
        return self.iota.source

    @property
    def V(self) -> FormalSpace:
        return self.iota.target

    @property
    def K(self) -> int:
        return self.f.target.dim


def composite(p: FactorizationPair) -> FormalMorphism:
    return compose(p.f, p.iota)


def _check_comparable(p: FactorizationPair, q: FactorizationPair) -> None:
    if p.source != q.source:
        raise ShapeError("pairs have different sources")
    if p.K != q.K:
        raise ShapeError(f"pairs have different truncation levels {p.K} and {q.K}")


def first_difference(p: FactorizationPair, q: FactorizationPair):
    _check_comparable(p, q)
    for k, (a, b) in enumerate(zip(composite(p).components, composite(q).components)):
        if a != b:
            return k
    return None


def equal_composites(p: FactorizationPair, q: FactorizationPair) -> bool:
    return first_difference(p, q) is None


@dataclass(frozen=True)
class RelationStep:
    """One instance of the generating relation.

    ``forward``: ``connecting: V_from -> V_to`` with ``connecting o iota_from = iota_to``
    and ``f_to o connecting = f_from``; ``backward`` is the mirror image.
    """

    from_pair: FactorizationPair
    to_pair: FactorizationPair
    connecting: FormalMorphism
    direction: str
    kind: str = ""

    def reversed(self) -> "RelationStep":
        flip = "backward" if self.direction == "forward" else "forward"
        return RelationStep(self.to_pair, self.from_pair, self.connecting, flip, self.kind)

    def verify(self) -> dict:
        if self.direction == "forward":
            src, dst = self.from_pair, self.to_pair
        elif self.direction == "backward":
            src, dst = self.to_pair, self.from_pair
        else:
            raise ShapeError(f"unknown direction {self.direction!r}")
        # connecting: src.V -> dst.V
        if not _same_components(compose(self.connecting, src.iota), dst.iota):
            raise VerificationError(f"{self.kind} step: iota triangle fails",
                                    identity="connecting∘iota = iota'")
        if not _same_components(compose(dst.f, self.connecting), src.f):
            raise VerificationError(f"{self.kind} step: f triangle fails",
                                    identity="f'∘connecting = f")
        return {"iota_triangle": "exact", "f_triangle": "exact"}


@dataclass(frozen=True)
class WitnessSpan:
    W: FormalSpace
    alpha: FormalMorphism
    alpha_prime: FormalMorphism
    phi: FormalMorphism
    delta: tuple                  # one polynomial per component, in source coordinates
    mu: tuple                     # mu[k][i]: coefficient of h_i in delta_k
    h: tuple
    pair: FactorizationPair
    pair_prime: FactorizationPair
    rectified: tuple = field(repr=False, default=())   # (iota_r, f_r, iota_r', f_r')
    verification: dict = field(default_factory=dict)

    def middle_pair(self) -> FactorizationPair:
        return FactorizationPair(compose(self.alpha, self.pair.iota), self.phi)


def _slice(f: FormalMorphism, iota: FormalMorphism) -> list:
    """``f o iota`` by raw substitution, without passing to the quotient."""
    assign = iota.assignment
    return [c.substitute(assign, vars=iota.source.coords) for c in f.components]


def verify_span(span: WitnessSpan) -> dict:
    p, q = span.pair, span.pair_prime
    checks = [
        ("phi∘alpha = f", lambda: _same_components(compose(span.phi, span.alpha), p.f)),
        ("phi∘alpha' = f'", lambda: _same_components(compose(span.phi, span.alpha_prime), q.f)),
        ("alpha∘iota = alpha'∘iota'", lambda: _same_components(
            compose(span.alpha, p.iota), compose(span.alpha_prime, q.iota))),
    ]
    if span.rectified:
        iota_r, f_r, iota_rp, f_rp = span.rectified

        def delta_matches():
            a, b = _slice(f_r, iota_r), _slice(f_rp, iota_rp)
            return all(d == y - x for d, x, y in zip(span.delta, a, b))

        checks.append(("delta = f'(.,0) - f(.,0)", delta_matches))
    checks.append(("delta = sum h_i mu^i", lambda: all(
        d == sum((h * m for h, m in zip(span.h, mus)), Polynomial.zero())
        for d, mus in zip(span.delta, span.mu))))
    record = {}
    for name, check in checks:
        if not check():
            raise VerificationError(f"witness span violates {name}", identity=name)
        record[name] = "exact"
    return record


def _maybe_perturb(phi: FormalMorphism) -> FormalMorphism:
    if _FAULT.get() == "perturb-phi":
        comps = (phi.components[0] + 1,) + phi.components[1:]
        return FormalMorphism(phi.source, phi.target, comps)
    return phi


def _witness_space(V: FormalSpace, Vp: FormalSpace, n: int) -> FormalSpace:
    names = cartesian_block("a", V.dim) + cartesian_block("b", Vp.dim) + cartesian_block("j", n)
    return FormalSpace.cartesian(names, name="W")


def _build_span(iota, iota_p, f, f_p, mu_rows, h, rectified, extra=None):
    """Assemble alpha, alpha', phi in rectified coordinates ``(u, t, x)``."""
    src = iota.source
    m = src.dim                      # q + d leading coordinates (u, t)
    q = len(src.params)
    V, Vp = iota.target, iota_p.target
    n = len(h)
    W = _witness_space(V, Vp, n)
    a = W.params[:V.dim]
    b = W.params[V.dim:V.dim + Vp.dim]
    j = W.params[V.dim + Vp.dim:]

    def wv(name):
        return W.coordinate(name)

    zero_v = Polynomial.zero(V.coords)
    vcoord = [V.coordinate(c) for c in V.coords]
    alpha = FormalMorphism(V, W, tuple(
        vcoord                                   # (u, t, x)
        + vcoord[:m] + [zero_v] * (Vp.dim - m)   # (u, t, 0)
        + [zero_v] * n))                         # 0
    zero_vp = Polynomial.zero(Vp.coords)
    vpcoord = [Vp.coordinate(c) for c in Vp.coords]
    eps_to_t = dict(zip(src.eps, vpcoord[q:m]))
    alpha_p = FormalMorphism(Vp, W, tuple(
        vpcoord[:m] + [zero_vp] * (V.dim - m)    # (u, t', 0)
        + vpcoord                                # (u, t', x')
        + [hi.substitute(eps_to_t, vars=Vp.coords) for hi in h]))   # h(t')

    first = [wv(c) for c in a]
    to_a = dict(zip(src.coords, first[:m]))
    f_at_a = {c: first[i] for i, c in enumerate(V.coords)}
    fp_at_a0 = {c: (first[i] if i < m else 0) for i, c in enumerate(Vp.coords)}
    fp_at_ab = {c: (first[i] if i < m else wv(b[i])) for i, c in enumerate(Vp.coords)}
    comps = []
    for fk, fpk, mus in zip(f.components, f_p.components, mu_rows):
        val = (fk.substitute(f_at_a, vars=W.coords)
               - fpk.substitute(fp_at_a0, vars=W.coords)
               + fpk.substitute(fp_at_ab, vars=W.coords))
        for ji, mu in zip(j, mus):
            val = val + wv(ji) * mu.substitute(to_a, vars=W.coords)
        comps.append(val)
    phi = _maybe_perturb(FormalMorphism(W, f.target, tuple(comps)))
    return W, alpha, alpha_p, phi


def witness_general(iota: FormalMorphism, iota_p: FormalMorphism,
                    f: FormalMorphism, f_p: FormalMorphism) -> WitnessSpan:
    """Witness span for rectified ``iota = (u, eps, 0)``, ``iota' = (u, eps, 0)``.

    ``delta(u, t) = f'(u, t, 0) - f(u, t, 0)`` is decomposed over the algebra's
    generators with u-dependent coefficients.
    """
    if iota.source != iota_p.source:
        raise ShapeError("iota and iota' have different sources")
    for name, m in (("iota", iota), ("iota'", iota_p)):
        if not is_rectified(m):
            raise NotRectifiedError(f"{name} is not in standard position (u, eps, 0)")
    pair, pair_p = FactorizationPair(iota, f), FactorizationPair(iota_p, f_p)
    _check_comparable(pair, pair_p)
    A = iota.source.thickening
    delta = tuple(y - x for x, y in zip(_slice(f, iota), _slice(f_p, iota_p)))
    mu = tuple(tuple(ideal_decompose(dk, A)) for dk in delta)
    h = tuple(A.generators)
    W, alpha, alpha_p, phi = _build_span(iota, iota_p, f, f_p, mu, h, True)
    span = WitnessSpan(W, alpha, alpha_p, phi, delta, mu, h, pair, pair_p,
                       rectified=(iota, f, iota_p, f_p))
    return _verified(span)


def witness_point(iota, iota_p, f, f_p) -> WitnessSpan:
    """Witness span over a thickened point (no parameter coordinates)."""
    if iota.source.params:
        raise ShapeError("witness_point expects a source without parameters; use witness_general")
    return witness_general(iota, iota_p, f, f_p)


def witness_d1(iota, iota_p, f, f_p) -> WitnessSpan:
    """Witness span over the first-order disk, for affine monomorphisms ``iota``, ``iota'``.

    Both embeddings are first straightened by an affine change of coordinates;
    the correction term comes from the order-1 Hadamard remainder of delta.
    """
    src = iota.source
    A = src.thickening
    if src.params or A.d != 1 or A.dim != 2 or iota_p.source != src:
        raise ShapeError("witness_d1 needs both maps out of the first-order disk D1(1)")
    for name, m in (("iota", iota), ("iota'", iota_p)):
        if not is_mono_point(m):
            raise NotMonoError(f"{name} is not a monomorphism (its tangent vector vanishes)")
    pair, pair_p = FactorizationPair(iota, f), FactorizationPair(iota_p, f_p)
    _check_comparable(pair, pair_p)
    D, D_inv = rectify_affine(iota)
    Dp, Dp_inv = rectify_affine(iota_p)
    iota_r, iota_rp = compose(D, iota), compose(Dp, iota_p)
    f_r, f_rp = compose(f, D_inv), compose(f_p, Dp_inv)

    x = src.eps[0]
    delta = tuple(y - a for a, y in zip(_slice(f_r, iota_r), _slice(f_rp, iota_rp)))
    mu = []
    for dk in delta:
        rem = vanishing_quotient(dk, [x], 1)
        mu.append((rem.get((2,), Polynomial.zero(src.coords)),))
    h = (Polynomial.var(x) ** 2,)

    V, Vp = iota_r.target, iota_rp.target
    W = _witness_space(V, Vp, 1)
    a, b, j = W.params[:V.dim], W.params[V.dim:V.dim + Vp.dim], W.params[-1]
    t = Polynomial.var(a[0], W.coords)
    zero = Polynomial.zero(V.coords)
    tv = V.coordinate(V.coords[0])
    alpha_r = FormalMorphism(V, W, tuple(
        [V.coordinate(c) for c in V.coords] + [tv] + [zero] * (Vp.dim - 1) + [zero]))
    tp = Vp.coordinate(Vp.coords[0])
    zero_p = Polynomial.zero(Vp.coords)
    alpha_rp = FormalMorphism(Vp, W, tuple(
        [tp] + [zero_p] * (V.dim - 1) + [Vp.coordinate(c) for c in Vp.coords] + [tp ** 2]))
    comps = []
    for fk, fpk, (muk,) in zip(f_r.components, f_rp.components, mu):
        at_a = {c: W.coordinate(w) for c, w in zip(V.coords, a)}
        at_t0 = {c: (t if i == 0 else 0) for i, c in enumerate(Vp.coords)}
        at_tb = {c: (t if i == 0 else W.coordinate(b[i])) for i, c in enumerate(Vp.coords)}
        comps.append(fk.substitute(at_a, vars=W.coords) - fpk.substitute(at_t0, vars=W.coords)
                     + fpk.substitute(at_tb, vars=W.coords)
                     + W.coordinate(j) * muk.substitute({x: t}, vars=W.coords))
    phi = _maybe_perturb(FormalMorphism(W, f.target, tuple(comps)))
    span = WitnessSpan(W, compose(alpha_r, D), compose(alpha_rp, Dp), phi, delta,
                       tuple(mu), h, pair, pair_p, rectified=(iota_r, f_r, iota_rp, f_rp))
    return _verified(span)


def _verified(span: WitnessSpan) -> WitnessSpan:
    record = verify_span(span)
    object.__setattr__(span, "verification", record)
    return span


# -- embedding and the equivalence decision -------------------------------

def embed_factorization(p: FactorizationPair) -> tuple:
    """Replace ``iota`` by the formal proper embedding ``(i, u, eps)`` into ``V x U x R^d``.

    Returns ``(p_hat, step)`` where ``step`` relates ``p`` and ``p_hat`` through
    the projection onto ``V``.
    """
    src, V = p.source, p.V
    q, d = len(src.params), len(src.eps)
    names = cartesian_block("v", V.dim) + cartesian_block("s", q) + cartesian_block("t", d)
    Vh = FormalSpace.cartesian(names, name="VxUxR^d")
    pr = FormalMorphism(Vh, V, tuple(Vh.coordinate(c) for c in names[:V.dim]))
    iota_h = FormalMorphism(src, Vh, p.iota.components
                            + tuple(src.coordinate(c) for c in src.coords))
    p_hat = FactorizationPair(iota_h, compose(p.f, pr))
    step = RelationStep(p, p_hat, pr, "backward", kind="embed")
    step.verify()
    return p_hat, step


def _straighten(p: FactorizationPair) -> tuple:
    """``p`` -> embed -> reorder -> shear; returns the rectified pair and the steps."""
    p_hat, s_embed = embed_factorization(p)
    perm, perm_inv = reorder_parts(p_hat.iota)
    p_perm = FactorizationPair(compose(perm, p_hat.iota), compose(p_hat.f, perm_inv))
    s_perm = RelationStep(p_hat, p_perm, perm, "forward", kind="reorder")
    shear, shear_inv = shear_parts(p_perm.iota, p.V.dim)
    p_r = FactorizationPair(compose(shear, p_perm.iota), compose(p_perm.f, shear_inv))
    s_shear = RelationStep(p_perm, p_r, shear, "forward", kind="shear")
    return p_r, [s_embed, s_perm, s_shear]


@dataclass(frozen=True)
class EquivalenceChain:
    pair: FactorizationPair
    pair_prime: FactorizationPair
    steps: tuple
    span: WitnessSpan | None = None

    equivalent = True

    def verify(self) -> list:
        records = []
        current = self.pair
        target = composite(self.pair)
        for step in self.steps:
            if step.from_pair != current:
                raise VerificationError("chain is not connected", identity="step endpoints")
            records.append(step.verify())
            current = step.to_pair
            if not _same_components(composite(current), target):
                raise VerificationError("composite changes along the chain",
                                        identity="f∘iota constant along chain")
        if current != self.pair_prime:
            raise VerificationError("chain does not end at the second pair",
                                    identity="step endpoints")
        return records


@dataclass(frozen=True)
class NotEquivalent:
    pair: FactorizationPair
    pair_prime: FactorizationPair
    first_differing_component: int

    equivalent = False


def decide_equivalence(p: FactorizationPair, p_prime: FactorizationPair):
    """Return a verified ``EquivalenceChain`` or a ``NotEquivalent`` report."""
    k = first_difference(p, p_prime)
    if k is not None:
        return NotEquivalent(p, p_prime, k)
    if p == p_prime:
        chain = EquivalenceChain(p, p_prime, ())
        chain.verify()
        return chain
    p_r, left = _straighten(p)
    q_r, right = _straighten(p_prime)
    span = witness_general(p_r.iota, q_r.iota, p_r.f, q_r.f)
    middle = span.middle_pair()
    steps = left + [
        RelationStep(p_r, middle, span.alpha, "forward", kind="span"),
        RelationStep(middle, q_r, span.alpha_prime, "backward", kind="span"),
    ] + [s.reversed() for s in reversed(right)]
    chain = EquivalenceChain(p, p_prime, tuple(steps), span)
    chain.verify()
    return chain


def lift_plot(plot: FormalMorphism) -> FactorizationPair:
    """Factor a plot ``U x D -> R^K`` through ``V = U x R^d`` via normal-form representatives."""
    src = plot.source
    q, d = len(src.params), len(src.eps)
    names = cartesian_block("s", q) + cartesian_block("t", d)
    V = FormalSpace.cartesian(names, name="UxR^d")
    iota = FormalMorphism(src, V, tuple(src.coordinate(c) for c in src.coords))
    rename = dict(zip(src.coords, names))
    f = FormalMorphism(V, plot.target,
                       tuple(c.rename(rename).with_vars(names) for c in plot.components))
    return FactorizationPair(iota, f)
