from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from jetkernel.errors import NotInIdealError, NotNilpotentError
from jetkernel.polyring import Polynomial, divide, monomials_of_degree, make_monomial
from jetkernel.weil import POINT, disk, ideal_decompose, make_weil, normal_form, weil_tensor

P = Polynomial.parse


def test_make_weil_first_order_disk():
    A = make_weil(1, ["x^2"])
    assert [str(Polynomial({m: 1})) for m in A.basis] == ["1", "x"]
    assert (A.k, A.dim) == (1, 2)


def test_make_weil_disk_2_2():
    cubes = [Polynomial({make_monomial(zip(("e1", "e2"), e)): 1})
             for e in monomials_of_degree(2, 3)]
    A = make_weil(2, cubes)
    assert (A.dim, A.k) == (6, 2)


def test_make_weil_not_nilpotent():
    with pytest.raises(NotNilpotentError):
        make_weil(1, ["x - 1"])
    with pytest.raises(NotNilpotentError):
        make_weil(1, ["1"])
    with pytest.raises(NotNilpotentError):
        make_weil(2, ["x^2"])          # y never appears
    with pytest.raises(NotNilpotentError):
        make_weil(1, ["x^40"], k_max=32)


def test_disk_examples():
    assert disk(1, 1).dim == 2
    assert disk(0, 3).dim == 1 and disk(0, 3).d == 0
    assert disk(3, 2).dim == 10


@pytest.mark.parametrize("d", range(6))
@pytest.mark.parametrize("k", range(6))
def test_disk_dimension_formula(d, k):
    A = disk(d, k)
    assert A.dim == comb(d + k, d)
    assert A.k == (k if d else 0)


@pytest.mark.parametrize("A", [disk(1, 1), disk(2, 2), disk(1, 3),
                               make_weil(2, ["x^2", "x*y", "y^3"]),
                               make_weil(2, ["x^2 - y^2", "x*y"])], ids=repr)
def test_nilpotency_order_is_minimal(A):
    one = ()
    for m in A.basis:
        if m != one:
            mono = Polynomial({m: 1}, A.vars)
            assert normal_form(mono ** (A.k + 1), A).is_zero()
    assert any(not normal_form(Polynomial({make_monomial(zip(A.vars, e)): 1}, A.vars), A).is_zero()
               for e in monomials_of_degree(A.d, A.k))
    assert () in A.basis


def test_non_monomial_algebra():
    A = make_weil(2, ["x^2 - y^2", "x*y"])
    assert A.dim == 4 and A.k == 2
    assert normal_form(P("x^2"), A).value == normal_form(P("y^2"), A).value


def test_tensor_examples():
    T = weil_tensor(disk(1, 1), disk(1, 1))
    assert T.dim == 4 and T.vars == ("e1", "e1_2")
    assert len(T.basis) == 4
    assert weil_tensor(disk(1, 1), disk(1, 2)).dim == 6
    assert weil_tensor(disk(1, 1), disk(1, 2)).k == 3
    A = make_weil(2, ["x^2", "x*y", "y^3"])
    assert weil_tensor(A, POINT).dim == A.dim


def test_normal_form_examples():
    A = disk(1, 1, ("x",))
    assert normal_form(P("x^2"), A).is_zero()
    assert normal_form(P("1 + x") * P("1 + x"), A).value == P("1 + 2*x")
    assert normal_form(P("u*x + x^3"), A).value == P("u*x")


def test_weil_element_arithmetic():
    A = disk(1, 1, ("x",))
    a = A.element(P("1 + x"))
    assert (a * a).value == P("1 + 2*x")
    assert (a ** 3).value == P("1 + 3*x")
    assert [str(c) for c in a.coordinates()] == ["1", "1"]


def test_ideal_decompose_examples():
    A = make_weil(1, ["t^2"])
    assert ideal_decompose(P("t^2"), A) == [1]
    assert ideal_decompose(P("t^3"), A) == [P("t")]
    assert ideal_decompose(P("u*t^2 + t^4"), A) == [P("u + t^2")]
    with pytest.raises(NotInIdealError):
        ideal_decompose(P("t"), A)


def test_ideal_decompose_uses_original_generators():
    A = make_weil(2, ["x^2 - y^2", "x*y", "y^3"])
    p = P("x^2*y - y^3 + 3*x*y")
    mu = ideal_decompose(p, A)
    assert sum((h * m for h, m in zip(A.generators, mu)), Polynomial.zero()) == p


coeff = st.integers(-3, 3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([disk(2, 2), make_weil(2, ["x^2", "x*y", "y^3"]),
                        make_weil(2, ["x^2 - y^2", "x*y"]), disk(1, 3)]),
       st.lists(coeff, min_size=10, max_size=10), st.lists(coeff, min_size=10, max_size=10))
def test_normal_form_is_homomorphism(A, ca, cb):
    monos = [Polynomial({make_monomial(zip(A.vars, e)): 1}, A.vars)
             for d in range(4) for e in monomials_of_degree(A.d, d)][:10]
    a = sum((m * c for m, c in zip(monos, ca)), Polynomial.zero())
    b = sum((m * c for m, c in zip(monos, cb)), Polynomial.zero())
    na, nb = normal_form(a, A).value, normal_form(b, A).value
    assert normal_form(a * b, A).value == normal_form(na * nb, A).value
    assert normal_form(a + b, A).value == na + nb


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coeff, coeff, coeff), min_size=3, max_size=3))
def test_ideal_decompose_roundtrip(rows):
    A = make_weil(2, ["x^2", "x*y", "y^3"])
    p = Polynomial.zero()
    for h, (a, b, c) in zip(A.generators, rows):
        p = p + h * (P("u") * a + P("x") * b + c)
    mu = ideal_decompose(p, A)
    assert sum((h * m for h, m in zip(A.generators, mu)), Polynomial.zero()) == p
    assert divide(p, A.gb)[1].is_zero()


@pytest.mark.parametrize("A,B", [(disk(1, 1), disk(2, 1)), (disk(1, 2), make_weil(1, ["x^3"])),
                                 (make_weil(2, ["x^2", "x*y", "y^2"]), disk(1, 1))])
def test_tensor_dimension_multiplicative(A, B):
    T = weil_tensor(A, B)
    assert T.dim == A.dim * B.dim
    assert T.k == A.k + B.k
