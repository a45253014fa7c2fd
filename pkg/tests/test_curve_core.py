from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mwfamily.curve_core import (O, Point, add, contains, division_poly_eval, kl_identity_residual,
                                 make_curve, named_points, negate, scalar_mul, sub, u_of_x,
                                 uz_eval, x_double)
from mwfamily.errors import DomainError

from helpers import lattice_points


def test_invariants():
    C = make_curve(1, 2)
    assert (C.a4, C.a6, C.disc) == (-1, 4, -6848)
    assert make_curve(1, 1).disc == -368
    assert make_curve(10, 1).disc == 63999568
    assert (C.b2, C.b4, C.b6, C.b8, C.c4, C.c6) == (0, -2, 16, -1, 48, -864 * 4)


@pytest.mark.parametrize("m,n", [(0, 1), (1, 0), (-2, 3)])
def test_make_curve_rejects(m, n):
    with pytest.raises(DomainError):
        make_curve(m, n)


def test_contains():
    assert contains(make_curve(1, 2), Point(0, 2))
    assert contains(make_curve(10, 1), Point(12, -23))
    assert not contains(make_curve(1, 2), Point(1, 1))
    assert contains(make_curve(1, 2), O)


def test_addition_examples():
    C = make_curve(10, 1)
    assert add(C, Point(0, 1), Point(10, 1)) == Point(-10, -1)
    assert add(C, Point(-10, 1), Point(-1, 10)) == Point(12, -23)
    assert add(C, Point(0, 1), O) == Point(0, 1)
    with pytest.raises(DomainError):
        add(C, Point(1, 1), O)


def test_scalar_examples():
    assert scalar_mul(make_curve(1, 1), Point(1, 1), 3) == Point(0, -1)
    assert scalar_mul(make_curve(3, 1), Point(-1, 3), 2) == Point(3, 1)
    C = make_curve(5, 1)
    P = Point(0, 1)
    assert scalar_mul(C, P, 1) == P
    assert scalar_mul(C, P, 0) == O
    assert scalar_mul(C, P, -5) == negate(C, scalar_mul(C, P, 5))


def test_division_polynomials():
    assert division_poly_eval(make_curve(1, 5), "psi2", Point(0, 5)) == 10
    for n in (2, 5, 30):
        assert division_poly_eval(make_curve(1, n), "psi3", Point(0, n)) == -1
    assert division_poly_eval(make_curve(10, 1), 3, Point(0, 1)) == -10000
    with pytest.raises(DomainError):
        division_poly_eval(make_curve(1, 2), 3, O)


def test_u_values():
    C = make_curve(10, 1)
    assert uz_eval(C, Point(0, 1)) == (10000, None)
    assert uz_eval(C, Point(-10, 1))[0] == 40080 == 4 * 10 ** 4 + 80
    assert uz_eval(C, Point(-1, 10))[0] == 10209 == 10 ** 4 + 2 * 100 + 9
    u, z = uz_eval(C, Point(12, -23))
    assert z == u / Fraction(12) ** 4


@pytest.mark.parametrize("m,n,P", [(1, 2, (0, 2)), (10, 1, (-1, 10)), (7, 1, (-3, 11))])
def test_identity_examples(m, n, P):
    assert kl_identity_residual(make_curve(m, n), Point(*P)) == 0


def test_named_points():
    pts = named_points(make_curve(1, 5))
    assert pts == {"P0": Point(0, 5), "Pplus1": Point(1, 5), "Pminus1": Point(-1, 5)}
    C = make_curve(10, 1)
    pts = named_points(C)
    assert pts["P2"] == Point(-1, 10)
    assert all(contains(C, P) for P in pts.values())
    total = add(C, add(C, pts["P0"], pts["Pplus1"]), pts["Pminus1"])
    assert total == O


curves = st.one_of(st.integers(2, 40).map(lambda n: make_curve(1, n)),
                   st.integers(2, 40).map(lambda m: make_curve(m, 1)))


@st.composite
def curve_and_points(draw, k=3):
    C = draw(curves)
    pool = lattice_points(C, bound=1)
    return C, [draw(st.sampled_from(pool)) for _ in range(k)]


@given(curve_and_points())
def test_group_axioms(data):
    C, (P, Q, R) = data
    assert add(C, P, Q) == add(C, Q, P)
    assert add(C, add(C, P, Q), R) == add(C, P, add(C, Q, R))
    assert add(C, P, negate(C, P)) == O
    assert sub(C, add(C, P, Q), Q) == P
    for S in (add(C, P, Q), scalar_mul(C, P, 3)):
        assert contains(C, S)


@given(curve_and_points(k=1))
def test_duplication_formula_and_identity(data):
    C, (P,) = data
    D = scalar_mul(C, P, 2)
    if not D.is_infinity:
        assert x_double(C, P.x) == D.x
        assert u_of_x(C, P.x) == D.x * 4 * C.f(P.x)
    assert kl_identity_residual(C, P) == 0
