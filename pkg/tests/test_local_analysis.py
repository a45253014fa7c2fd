import math
from fractions import Fraction

import pytest

from mwfamily.curve_core import Curve, make_curve
from mwfamily.errors import PreconditionError
from mwfamily.local_analysis import (KodairaType, cube_root_bracket, disc_factorization,
                                     expected_disc_valuation, icbrt, is_global_minimal,
                                     kodaira_type, real_root_bounds, rederive_small_prime_type,
                                     square_factors, squarefree_condition_holds)
from mwfamily.number_core import valuation
from mwfamily.polyroots import bisect_sign_change


def test_minimality_examples():
    for m, n in [(1, 2), (10, 1), (3, 1)]:
        assert is_global_minimal(make_curve(m, n))


def test_minimal_for_all_coprime_up_to_500():
    assert all(is_global_minimal(Curve(m, n))
               for m in range(1, 501) for n in range(1, 501) if math.gcd(m, n) == 1)


def test_nonminimal_model_detected():
    # scaling (m, n) by 6^3 * 5-ish multiples makes a u = 6 change of variables possible
    C = Curve(216, 1080)
    assert not is_global_minimal(C)


def test_kodaira_examples():
    assert str(kodaira_type(make_curve(1, 1), 2)) == "IV"
    assert str(kodaira_type(make_curve(1, 2), 2)) == "III"
    assert str(kodaira_type(make_curve(3, 1), 3)) == "III"
    assert kodaira_type(make_curve(1, 2), 107) == KodairaType("I", 1)
    assert kodaira_type(make_curve(4, 2), 2).symbol == "Unsupported"
    with pytest.raises(PreconditionError):
        kodaira_type(make_curve(3, 3), 3)


def test_small_prime_types_rederived_by_coordinate_shifts():
    for m in range(1, 51):
        for n in range(1, 51):
            if math.gcd(m, n) != 1:
                continue
            C = make_curve(m, n)
            for p in (2, 3):
                assert kodaira_type(C, p) == rederive_small_prime_type(C, p)


def test_disc_valuation_consistent_with_type():
    for m in range(1, 41):
        for n in range(1, 41):
            if math.gcd(m, n) != 1:
                continue
            C = make_curve(m, n)
            for p, e in disc_factorization(C).factors:
                t = kodaira_type(C, p)
                want = expected_disc_valuation(C, p, t)
                if want is not None:
                    assert want == e, (m, n, p, t)


def test_squarefree_condition():
    assert squarefree_condition_holds(make_curve(1, 2))
    assert squarefree_condition_holds(make_curve(1, 1))
    C = make_curve(7, 1)
    assert not squarefree_condition_holds(C)
    assert str(disc_factorization(C)) == "2^4 * 11^2 * 3889"
    assert square_factors(C) == [(11, 2)]


def test_cube_roots():
    assert [icbrt(k) for k in (0, 1, 7, 8, 26, 27, 10 ** 30, 10 ** 30 - 1)] == \
        [0, 1, 1, 2, 2, 3, 10 ** 10, 10 ** 10 - 1]
    lo, hi = cube_root_bracket(729)
    assert lo <= 9 <= hi and hi - lo == Fraction(1, 2 ** 80)
    lo, hi = cube_root_bracket(2)
    assert lo ** 3 <= 2 <= hi ** 3


def test_root_bounds_one_root():
    rb = real_root_bounds(make_curve(1, 27))
    assert rb.root_count == 1
    lo, hi = rb.roots[0]
    assert Fraction("-9.0371") < lo and hi < Fraction("-9.0370")
    blo, bhi = rb.bounds["lower_via_l"]
    assert abs(bhi - Fraction(-9) * (1 + Fraction(1, 243))) < Fraction(1, 10 ** 12)
    assert all(rb.holds.values())
    assert real_root_bounds(make_curve(1, 1)).root_count == 1


def test_root_bounds_three_roots():
    C = make_curve(10, 1)
    rb = real_root_bounds(C)
    assert rb.root_count == 3 and all(rb.holds.values())
    assert rb.bounds["alpha_lower"][0] == Fraction("-10.005")
    assert rb.bounds["beta_upper"][0] == Fraction("0.02")
    assert rb.bounds["gamma_lower"][0] == Fraction("9.99")
    # the brackets agree with plain sign-change bisection
    f = [1, -100, 0, 1]
    for (lo, hi), (a, b) in zip(rb.roots, [(-11, -10), (0, 1), (9, 10)]):
        blo, bhi = bisect_sign_change(f, Fraction(a), Fraction(b), Fraction(1, 10 ** 12))
        assert blo <= hi and lo <= bhi


def test_root_bounds_bracketing_sweep():
    for n in range(1, 60):
        assert all(real_root_bounds(make_curve(1, n)).holds.values())
    for m in range(2, 80):
        C = make_curve(m, 1)
        rb = real_root_bounds(C)
        assert rb.root_count == (1 if 27 > 4 * m ** 6 else 3)
        assert all(rb.holds.values()), m
