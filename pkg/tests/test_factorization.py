import random

import pytest
from hypothesis import given, settings, strategies as st

from jetkernel.errors import (
    NonvanishingJetError,
    NotInIdealError,
    NotMonoError,
    NotRectifiedError,
    ShapeError,
    TypeMismatchError,
    VerificationError,
)
from jetkernel.factorization import (
    FactorizationPair,
    composite,
    decide_equivalence,
    embed_factorization,
    equal_composites,
    first_difference,
    inject_fault,
    lift_plot,
    witness_d1,
    witness_general,
    witness_point,
)
from jetkernel.formal import FormalMorphism, FormalSpace, compose, is_rectified, rectified_inclusion
from jetkernel.polyring import Polynomial
from jetkernel.randgen import (
    equal_composite_partner,
    perturb,
    rand_pair,
    rand_plot,
    rand_poly,
    rand_source,
)
from jetkernel.weil import disk, make_weil

P = Polynomial.parse
D1 = disk(1, 1, ("x",))
DOT = FormalSpace((), D1, "D")
V = FormalSpace.cartesian(("t", "x1"))
Vp = FormalSpace.cartesian(("s", "x2"))
R1 = FormalSpace.cartesian(("y1",))

SPAN_IDENTITIES = {"phi∘alpha = f", "phi∘alpha' = f'", "alpha∘iota = alpha'∘iota'",
                   "delta = f'(.,0) - f(.,0)", "delta = sum h_i mu^i"}


def worked_pairs():
    iota = FormalMorphism(DOT, V, ("x", 0))
    iota_p = FormalMorphism(DOT, Vp, ("x", 0))
    f = FormalMorphism(V, R1, ("t + x1",))
    f_p = FormalMorphism(Vp, R1, ("s + x2 + s^2",))
    return iota, iota_p, f, f_p


# -- pairs and composites --------------------------------------------------------

def test_composite_examples():
    U = FormalSpace(("u",), D1)
    Vr = FormalSpace.cartesian(("a", "b", "c"))
    K3 = FormalSpace.cartesian(("y1", "y2", "y3"))
    p = FactorizationPair(rectified_inclusion(U, Vr), FormalMorphism(Vr, K3, ("a", 0, 0)))
    assert [str(c) for c in composite(p).components] == ["u", "0", "0"]
    iota, _, f, _ = worked_pairs()
    assert [str(c) for c in composite(FactorizationPair(iota, f)).components] == ["x"]


def test_pair_validation():
    iota, _, f, f_p = worked_pairs()
    with pytest.raises(TypeMismatchError):
        FactorizationPair(iota, f_p)
    with pytest.raises(ShapeError):
        FactorizationPair(FormalMorphism(DOT, DOT, ("x",)),
                          FormalMorphism(DOT, R1, ("x",)))


def test_equal_composites_examples():
    iota, iota_p, f, f_p = worked_pairs()
    p, q = FactorizationPair(iota, f), FactorizationPair(iota_p, f_p)
    assert equal_composites(p, p)
    assert equal_composites(p, q)
    bad = FactorizationPair(iota_p, FormalMorphism(Vp, R1, ("s + x2 + s^2 + x2 + 1",)))
    assert not equal_composites(p, bad)
    assert first_difference(p, bad) == 0


def test_equal_composites_shape_mismatch():
    iota, _, f, _ = worked_pairs()
    R2 = FormalSpace.cartesian(("y1", "y2"))
    p = FactorizationPair(iota, f)
    with pytest.raises(ShapeError):
        equal_composites(p, FactorizationPair(iota, FormalMorphism(V, R2, ("t", "x1"))))
    other = FormalSpace((), disk(1, 2, ("x",)))
    with pytest.raises(ShapeError):
        equal_composites(p, FactorizationPair(FormalMorphism(other, V, ("x", 0)), f))


# -- embedding ------------------------------------------------------------------

def test_embed_examples():
    iota, _, f, _ = worked_pairs()
    p = FactorizationPair(iota, f)
    p_hat, step = embed_factorization(p)
    assert p_hat.V.dim == 3
    assert step.verify() == {"iota_triangle": "exact", "f_triangle": "exact"}
    assert equal_composites(p, p_hat)

    single = FactorizationPair(FormalMorphism(DOT, R1, ("x",)), FormalMorphism(R1, R1, ("y1^2",)))
    p_hat, step = embed_factorization(single)
    assert p_hat.V.coords == ("v1", "t1")
    assert equal_composites(single, p_hat)


def test_embed_random_disk22():
    rng = random.Random(11)
    src = FormalSpace((), disk(2, 2))
    p = rand_pair(rng, src, 4, 3)
    p_hat, step = embed_factorization(p)
    step.verify()
    assert equal_composites(p, p_hat)


# -- witnesses -----------------------------------------------------------------

def test_witness_d1_worked_example():
    iota, iota_p, f, f_p = worked_pairs()
    span = witness_d1(iota, iota_p, f, f_p)
    assert span.delta == (P("x^2"),)
    assert span.mu == ((P("1"),),)
    assert [str(c) for c in span.phi.components] == ["a1 + a2 + b2 + j1"]
    assert set(span.verification) == SPAN_IDENTITIES
    assert set(span.verification.values()) == {"exact"}
    assert span.W.dim == 5


def test_witness_d1_diagonal():
    iota, _, f, _ = worked_pairs()
    span = witness_d1(iota, iota, f, f)
    assert all(d.is_zero() for d in span.delta)
    assert all(m.is_zero() for row in span.mu for m in row)
    assert compose(span.phi, span.alpha).components == f.components


def test_witness_d1_cubic_remainder():
    iota, iota_p, _, _ = worked_pairs()
    f = FormalMorphism(V, R1, ("t^2",))
    f_p = FormalMorphism(Vp, R1, ("s^2 + s^3",))
    span = witness_d1(iota, iota_p, f, f_p)
    assert span.delta == (P("x^3"),)
    assert span.mu == ((P("x"),),)


def test_witness_d1_non_rectified_embeddings():
    # iota = (2x, x) is mono but not rectified; the affine straightening is internal
    iota = FormalMorphism(DOT, V, ("2*x + 1", "x"))
    iota_p = FormalMorphism(DOT, Vp, ("x", "3*x"))
    f = FormalMorphism(V, R1, ("t*x1 + t",))
    # both composites are 3x + 1; the extra terms vanish to second order along iota'
    f_p = FormalMorphism(Vp, R1, ("3*s + 1 + s^2 - 1/9*x2^2 + x2*s - 3*s^2",))
    assert equal_composites(FactorizationPair(iota, f), FactorizationPair(iota_p, f_p))
    span = witness_d1(iota, iota_p, f, f_p)
    assert set(span.verification.values()) == {"exact"}


def test_witness_d1_errors():
    iota, iota_p, f, f_p = worked_pairs()
    flat = FormalMorphism(DOT, Vp, (0, 0))
    with pytest.raises(NotMonoError):
        witness_d1(iota, flat, f, f_p)
    with pytest.raises(NonvanishingJetError):
        witness_d1(iota, iota_p, f, FormalMorphism(Vp, R1, ("s + x2 + 2*s",)))
    U = FormalSpace(("u",), D1)
    with pytest.raises(ShapeError):
        witness_d1(FormalMorphism(U, V, ("u", "x")), FormalMorphism(U, V, ("u", "x")), f, f)


def _point_instance(seed):
    rng = random.Random(seed)
    A = make_weil(2, ["x^2", "x*y", "y^3"], vars=("x", "y"))
    src = FormalSpace((), A)
    Vx = FormalSpace.cartesian(("t1", "t2", "z"))
    Vy = FormalSpace.cartesian(("s1", "s2", "w"))
    K = FormalSpace.cartesian(("y1", "y2"))
    f = FormalMorphism(Vx, K, tuple(rand_poly(rng, Vx.coords, 3) for _ in range(2)))
    r = [[rand_poly(rng, ("s1", "s2"), 1) for _ in range(3)] for _ in range(2)]
    hs = [P("s1^2"), P("s1*s2"), P("s2^3")]
    rename = {"t1": P("s1"), "t2": P("s2"), "z": P("w")}
    comps = []
    for k in range(2):
        c = f.components[k].substitute(rename, vars=Vy.coords)
        for h, rr in zip(hs, r[k]):
            c = c + h * rr
        comps.append(c)
    f_p = FormalMorphism(Vy, K, tuple(comps))
    return src, rectified_inclusion(src, Vx), rectified_inclusion(src, Vy), f, f_p, r


@pytest.mark.parametrize("seed", range(5))
def test_witness_point_constructed_instance(seed):
    src, iota, iota_p, f, f_p, r = _point_instance(seed)
    span = witness_point(iota, iota_p, f, f_p)
    assert set(span.verification.values()) == {"exact"}
    to_eps = {"s1": P("x"), "s2": P("y")}
    for k in range(2):
        recombined = sum((h * m for h, m in zip(span.h, span.mu[k])), Polynomial.zero())
        expected = sum((h * rr.substitute(to_eps) for h, rr in zip(span.h, r[k])), Polynomial.zero())
        assert recombined == expected


def test_witness_point_not_in_ideal():
    src, iota, iota_p, f, f_p, _ = _point_instance(0)
    bumped = FormalMorphism(f_p.source, f_p.target,
                            (f_p.components[0] + P("s1"),) + f_p.components[1:])
    with pytest.raises(NotInIdealError):
        witness_point(iota, iota_p, f, bumped)


def test_witness_point_requires_rectified():
    iota, iota_p, f, f_p = worked_pairs()
    skew = FormalMorphism(DOT, V, ("x", "x"))
    with pytest.raises(NotRectifiedError):
        witness_point(skew, iota_p, f, f_p)
    U = FormalSpace(("u",), D1)
    W3 = FormalSpace.cartesian(("a", "b", "c"))
    inc = rectified_inclusion(U, W3)
    with pytest.raises(ShapeError):
        witness_point(inc, inc, FormalMorphism(W3, R1, ("a",)), FormalMorphism(W3, R1, ("a",)))


def test_witness_point_agrees_with_d1():
    iota, iota_p, f, f_p = worked_pairs()
    a, b = witness_point(iota, iota_p, f, f_p), witness_d1(iota, iota_p, f, f_p)
    assert a.phi.components == b.phi.components
    assert a.alpha == b.alpha and a.alpha_prime == b.alpha_prime


def test_witness_general_parameter_example():
    U = FormalSpace(("u",), D1)
    Vu = FormalSpace.cartesian(("a", "t", "z"))
    Vv = FormalSpace.cartesian(("b", "s", "w"))
    f = FormalMorphism(Vu, R1, ("a*t + z",))
    f_p = FormalMorphism(Vv, R1, ("b*s + w + b*s^2",))
    span = witness_general(rectified_inclusion(U, Vu), rectified_inclusion(U, Vv), f, f_p)
    assert span.delta == (P("u*x^2"),)
    assert span.mu == ((P("u"),),)
    assert compose(span.phi, span.alpha_prime).components == f_p.components
    assert set(span.verification) == SPAN_IDENTITIES


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_witness_general_random_disk22(seed):
    rng = random.Random(seed)
    src = FormalSpace(("u1", "u2"), disk(2, 2))
    Vx = FormalSpace.cartesian(("p1", "p2", "p3", "p4", "z"))
    Vy = FormalSpace.cartesian(("q1", "q2", "q3", "q4", "w"))
    K = FormalSpace.cartesian(("y1", "y2"))
    f = FormalMorphism(Vx, K, tuple(rand_poly(rng, Vx.coords, 2) for _ in range(2)))
    rename = dict(zip(Vx.coords, (Vy.coordinate(c) for c in Vy.coords)))
    cubes = [P("q3^3"), P("q3^2*q4"), P("q3*q4^2"), P("q4^3")]
    comps = []
    for c in f.components:
        c = c.substitute(rename, vars=Vy.coords)
        for h in cubes:
            c = c + h * rand_poly(rng, ("q1", "q2", "q3"), 1)
        comps.append(c)
    f_p = FormalMorphism(Vy, K, tuple(comps))
    span = witness_general(rectified_inclusion(src, Vx), rectified_inclusion(src, Vy), f, f_p)
    assert set(span.verification.values()) == {"exact"}


def test_fault_injection_names_identity():
    iota, iota_p, f, f_p = worked_pairs()
    with inject_fault("perturb-phi"):
        with pytest.raises(VerificationError) as e:
            witness_d1(iota, iota_p, f, f_p)
    assert e.value.details["identity"] == "phi∘alpha = f"
    witness_d1(iota, iota_p, f, f_p)   # hook is scoped


# -- equivalence -----------------------------------------------------------------

def test_decide_self():
    iota, _, f, _ = worked_pairs()
    p = FactorizationPair(iota, f)
    r = decide_equivalence(p, p)
    assert r.equivalent and r.steps == ()


def test_decide_worked_pairs():
    iota, iota_p, f, f_p = worked_pairs()
    p, q = FactorizationPair(iota, f), FactorizationPair(iota_p, f_p)
    r = decide_equivalence(p, q)
    assert r.equivalent
    assert [s.kind for s in r.steps] == ["embed", "reorder", "shear", "span", "span",
                                          "shear", "reorder", "embed"]
    assert r.steps[0].from_pair == p and r.steps[-1].to_pair == q
    assert all(rec == {"iota_triangle": "exact", "f_triangle": "exact"} for rec in r.verify())
    assert set(r.span.verification.values()) == {"exact"}


def test_decide_not_equivalent():
    iota, iota_p, f, _ = worked_pairs()
    R2 = FormalSpace.cartesian(("y1", "y2"))
    p = FactorizationPair(iota, FormalMorphism(V, R2, ("t", "x1")))
    q = FactorizationPair(iota_p, FormalMorphism(Vp, R2, ("s", "x2 + s")))
    r = decide_equivalence(p, q)
    assert not r.equivalent and r.first_differing_component == 1


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_decide_random_equal_pairs(seed):
    rng = random.Random(seed)
    p = rand_pair(rng, rand_source(rng), 3, rng.randint(1, 2))
    q = equal_composite_partner(rng, p)
    r = decide_equivalence(p, q)
    assert r.equivalent
    r.verify()


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_decide_random_perturbed_pairs(seed):
    rng = random.Random(seed)
    p = rand_pair(rng, rand_source(rng), 3, rng.randint(1, 2))
    q, k = perturb(rng, p)
    r = decide_equivalence(p, q)
    assert not r.equivalent and r.first_differing_component == k


# -- lifting ---------------------------------------------------------------------

def test_lift_plot_examples():
    U = FormalSpace(("u",), D1)
    R2 = FormalSpace.cartesian(("y1", "y2"))
    zero = lift_plot(FormalMorphism(U, R2, (0, 0)))
    assert all(c.is_zero() for c in zero.f.components)
    pair = lift_plot(FormalMorphism(U, R2, ("u + x", "x^2")))
    assert [str(c) for c in pair.f.components] == ["s1 + t1", "0"]
    assert is_rectified(pair.iota)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_lift_plot_is_section_of_composite(seed):
    rng = random.Random(seed)
    plot = rand_plot(rng, rand_source(rng), 8)
    assert composite(lift_plot(plot)) == plot
