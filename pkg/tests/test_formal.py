import random

import pytest
from hypothesis import given, settings, strategies as st

from jetkernel.errors import ShapeError, TypeMismatchError, UndecidableInputError
from jetkernel.formal import (
    FormalMorphism,
    FormalSpace,
    classify_embedding,
    compose,
    identity,
    is_formal_embedding,
    is_mono_point,
    is_rectified,
    morphism_equal,
    rectify_affine,
    shear_rectify,
)
from jetkernel.polyring import Polynomial
from jetkernel.randgen import rand_affine_diffeo, rand_plot, rand_poly, rand_source
from jetkernel.weil import disk, make_weil

P = Polynomial.parse
D1 = disk(1, 1, ("x",))
DOT = FormalSpace((), D1, "D")


def R(*names):
    return FormalSpace.cartesian(names)


def test_compose_examples():
    iota = FormalMorphism(DOT, R("t", "s"), ("x", 0))
    f = FormalMorphism(R("t", "s"), R("y"), ("t + s",))
    assert [str(c) for c in compose(f, iota).components] == ["x"]
    sq = FormalMorphism(R("t"), R("y"), ("t^2",))
    assert compose(sq, FormalMorphism(DOT, R("t"), ("x",))).components[0].is_zero()
    assert morphism_equal(compose(identity(R("t", "s")), iota), iota)
    assert morphism_equal(compose(f, identity(R("t", "s"))), f)


def test_compose_type_mismatch():
    f = FormalMorphism(R("t"), R("y"), ("t",))
    with pytest.raises(TypeMismatchError):
        compose(f, FormalMorphism(DOT, R("a", "b"), ("x", 0)))


def test_morphism_validates_target_relations():
    # x -> eps into D1(1) is fine, 1 + x is not nilpotent, and x into x^3 target ok
    D2 = FormalSpace((), disk(1, 2, ("e",)))
    FormalMorphism(D2, DOT, ("e^2",))
    with pytest.raises(ShapeError):
        FormalMorphism(DOT, DOT, ("1 + x",))
    with pytest.raises(ShapeError):
        FormalMorphism(D2, DOT, ("e",))      # e^2 != 0 in D1(2)
    with pytest.raises(ShapeError):
        FormalMorphism(DOT, R("a", "b"), ("x",))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_compose_associative(seed):
    rng = random.Random(seed)
    src = rand_source(rng)
    f = rand_plot(rng, src, 2)
    V = f.target
    g = FormalMorphism(V, R("z1", "z2"), tuple(rand_poly(rng, V.coords, 2) for _ in range(2)))
    h = FormalMorphism(g.target, R("w"), (rand_poly(rng, g.target.coords, 2),))
    assert morphism_equal(compose(h, compose(g, f)), compose(compose(h, g), f))


def test_is_mono_point_examples():
    assert is_mono_point(FormalMorphism(DOT, R("t"), ("x",)))
    assert not is_mono_point(FormalMorphism(DOT, R("t"), (0,)))
    assert is_mono_point(FormalMorphism(DOT, R("a", "b"), ("2*x", "3*x")))
    D2 = FormalSpace((), disk(1, 2, ("e",)))
    assert is_mono_point(FormalMorphism(D2, R("t"), ("e + e^2",)))
    assert not is_mono_point(FormalMorphism(D2, R("t"), ("e^2",)))
    # two generators needed for the square-zero pair
    A = make_weil(2, ["x^2", "x*y", "y^2"], vars=("x", "y"))
    S = FormalSpace((), A)
    assert not is_mono_point(FormalMorphism(S, R("t"), ("x + y",)))
    assert is_mono_point(FormalMorphism(S, R("a", "b"), ("x", "y")))


def test_is_formal_embedding_examples():
    U = FormalSpace(("u",), D1)
    assert is_formal_embedding(FormalMorphism(U, R("a", "b", "c"), ("u", "x", 0)))
    assert not is_formal_embedding(FormalMorphism(U, R("a", "b", "c"), ("u", 0, 0)))
    with pytest.raises(UndecidableInputError):
        is_formal_embedding(FormalMorphism(U, R("a", "b"), ("u^2", "x")))


def test_fiber_mono_depending_on_parameter_is_undecidable():
    U = FormalSpace(("u",), D1)
    with pytest.raises(UndecidableInputError):
        is_formal_embedding(FormalMorphism(U, R("a", "b"), ("u", "u*x")))


def test_classify_embedding():
    U = FormalSpace(("u",), D1)
    assert classify_embedding(FormalMorphism(U, R("a", "b", "c"), ("u", "x", 0))).kind == "rectified"
    assert classify_embedding(FormalMorphism(DOT, R("a", "b"), ("x", "x"))).kind == "mono_at_point"
    assert classify_embedding(FormalMorphism(DOT, R("a"), (0,))).kind == "general"


def test_rectify_affine_examples():
    iota = FormalMorphism(DOT, R("t"), ("x",))
    diffeo, inv = rectify_affine(iota)
    assert morphism_equal(diffeo, identity(R("t")))

    iota = FormalMorphism(DOT, R("s", "t"), ("2*x", 0))
    diffeo, inv = rectify_affine(iota)
    assert [str(c) for c in diffeo.components] == ["1/2*s", "t"]

    iota = FormalMorphism(DOT, R("s", "t"), ("x", "x"))
    diffeo, inv = rectify_affine(iota)
    assert [str(c) for c in diffeo.components] == ["s", "-s + t"]
    assert is_rectified(compose(diffeo, iota))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_rectify_affine_inverse_two_sided(seed):
    rng = random.Random(seed)
    V = R("v1", "v2", "v3")
    D, _ = rand_affine_diffeo(rng, V)
    base = FormalMorphism(DOT, V, ("x", 0, 0))
    iota = compose(D, base)
    diffeo, inv = rectify_affine(iota)
    assert morphism_equal(compose(diffeo, inv), identity(V))
    assert morphism_equal(compose(inv, diffeo), identity(V))
    assert is_rectified(compose(diffeo, iota))


def test_rectify_affine_rejects_nonlinear():
    with pytest.raises(ShapeError):
        rectify_affine(FormalMorphism(FormalSpace(("u",)), R("a"), ("u^2",)))


def test_shear_examples():
    S = FormalSpace((), D1)
    tgt = R("v", "t")
    diffeo, inv, iota_r = shear_rectify(FormalMorphism(S, tgt, (0, "x")))
    assert is_rectified(iota_r)
    assert [str(c) for c in diffeo.components] == ["t", "v"]

    diffeo, inv, iota_r = shear_rectify(FormalMorphism(S, tgt, ("x", "x")))
    assert list(diffeo.components) == [P("t"), P("v - t")]
    assert list(inv.components) == [P("t + v"), P("t")]

    U = FormalSpace(("u",), D1)
    iota = FormalMorphism(U, R("v", "a", "t"), ("u + x", "u", "x"))
    diffeo, inv, iota_r = shear_rectify(iota)
    assert is_rectified(iota_r)
    assert diffeo.components[2] == P("v - a - t")
    assert morphism_equal(compose(inv, iota_r), iota)
    assert morphism_equal(compose(diffeo, inv), identity(diffeo.target))


def test_shear_rejects_wrong_shape():
    S = FormalSpace((), D1)
    with pytest.raises(ShapeError):
        shear_rectify(FormalMorphism(S, R("v", "t"), ("x", 0)))
