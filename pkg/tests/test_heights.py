import math
import random
from fractions import Fraction

import mpmath
import pytest
import sympy

from mwfamily.curve_core import O, Point, _add, make_curve, named_points, psi3, scalar_mul
from mwfamily.errors import NotApplicableError, UnsupportedReductionError
from mwfamily.heights import (ArchStrategy, E1N_LOWER, E1N_UPPER_P0, E1N_UPPER_PM1, EM1_LOWER,
                              SHIFTED_Z_MAX, SHIFTED_Z_MIN, canonical_height, certify_shifted_z_range,
                              default_strategy, doubling_limit_oracle, doubling_limit_oracle_exact,
                              finite_part, lambda_arch, lambda_lower_bound, lambda_nonarch,
                              naive_x_height, regulator, scan_shifted_z_grid, shifted_z)

from helpers import lattice_points, sample_curves


def _ord(q, p):
    q = Fraction(q)
    if q == 0:
        return math.inf
    return sympy.multiplicity(p, q.numerator) - sympy.multiplicity(p, q.denominator)


def silverman_finite_part(C, P):
    """Finite part of the height from the general singular-point rule.

    Works from the valuations of 3x^2 + a4, 2y and psi3 alone, without the
    Kodaira symbol, and returns the sum as a float (Delta/12 terms omitted).
    """
    total = math.log(P.x.denominator) / 2
    for p in sympy.factorint(abs(C.disc)):
        A = _ord(3 * P.x ** 2 + C.a4, p)
        B = _ord(2 * P.y, p)
        if _ord(P.x, p) < 0 or A <= 0 or B <= 0:
            continue
        Cv = _ord(psi3(C, P.x), p)
        assert _ord(C.c4, p) > 0, "singular reduction on a multiplicative fibre"
        L = -Fraction(B, 3) if Cv >= 3 * B else -Fraction(Cv, 8)
        total += float(L) * math.log(p)
    return total


def _zero_in(combo):
    """True when sum(c * interval(h)) contains 0, evaluated in interval arithmetic."""
    with _IvPrec(200):
        acc = mpmath.iv.mpf(0)
        for c, h in combo:
            acc += c * h.interval()
        return 0 in acc


class _IvPrec:
    def __init__(self, bits):
        self.bits = bits

    def __enter__(self):
        self.saved = mpmath.iv.prec
        mpmath.iv.prec = self.bits

    def __exit__(self, *exc):
        mpmath.iv.prec = self.saved


def _fp_float(parts):
    return sum(float(c) * math.log(b) for b, c in parts)


def test_naive_height():
    assert naive_x_height(Point(0, 1)) == 0
    assert naive_x_height(Point(12, -23)) == pytest.approx(math.log(12))
    assert naive_x_height(Point(Fraction(22, 7), 0)) == pytest.approx(math.log(22))
    assert naive_x_height(O) == 0


def test_shifted_model_z_values():
    assert float(shifted_z(Fraction(9), Fraction(9))) == pytest.approx(9.0745, abs=1e-4)
    with mpmath.workdps(30):
        x0 = mpmath.findroot(lambda x: mpmath.diff(lambda y: shifted_z(y, mpmath.mpf(9)), x), 25)
        assert abs(x0 - mpmath.mpf("25.054819")) < 1e-6
        assert abs(shifted_z(x0, mpmath.mpf(9)) - mpmath.mpf("0.09801")) < 1e-5


def test_shifted_model_z_range_certified():
    holds, boxes = certify_shifted_z_range()
    assert holds and boxes > 0
    grid = scan_shifted_z_grid(401, 41)
    assert SHIFTED_Z_MIN < grid["zmin"] < 0.0981 and 9.07 < grid["zmax"] < SHIFTED_Z_MAX


def test_arch_first_term_and_tail_window():
    C = make_curve(10, 1)
    val, err = lambda_arch(C, Point(-1, 10))
    first = mpmath.log(10209) / 8
    # the remaining terms are (1/8) 4^-k log z with 1 < z < (1 + m^2/(m-1)^2)^2
    top = 2 * mpmath.log(1 + mpmath.mpf(100) / 81) / 24
    assert first < val < first + top
    assert err < mpmath.mpf(2) ** -64


def test_strategies_agree():
    C = make_curve(10, 1)
    P = Point(-1, 10)
    vals = [tuple(lambda_arch(C, P, s)) for s in (ArchStrategy.modified(0), ArchStrategy.shifted(11),
                                          ArchStrategy.shifted(30), ArchStrategy.modified(5))]
    for v, e in vals[1:]:
        assert abs(v - vals[0][0]) <= e + vals[0][1] + mpmath.mpf(2) ** -80


def test_default_strategy_kinds():
    assert default_strategy(make_curve(10, 1)).kind == "modified"
    assert default_strategy(make_curve(1, 30)).kind == "shifted"
    assert default_strategy(make_curve(1, 2)).kind == "shifted"


def test_nonarch_examples():
    C = make_curve(10, 1)
    assert lambda_nonarch(C, Point(0, 1), 2) == ((2, Fraction(-1, 3)),)
    C = make_curve(1, 4)
    assert psi3(C, Fraction(1)) % 8 == 4
    assert lambda_nonarch(C, Point(1, 4), 2) == ((2, Fraction(-1, 4)),)
    assert lambda_nonarch(make_curve(1, 7), Point(0, 7), 29) == ((29, 0),)


def test_nonarch_refuses_square_factor():
    C = make_curve(7, 1)
    with pytest.raises(UnsupportedReductionError):
        lambda_nonarch(C, Point(0, 1), 11)


@pytest.mark.parametrize("C", sample_curves(25, seed=3), ids=str)
def test_finite_part_matches_general_rule(C):
    for P in lattice_points(C, bound=1):
        if P.y == 0:
            continue
        assert _fp_float(finite_part(C, P)) == pytest.approx(silverman_finite_part(C, P), abs=1e-12)


def test_height_examples():
    assert canonical_height(make_curve(3, 1), O).value == 0
    C = make_curve(1, 28)
    h = canonical_height(C, Point(0, 28))
    third = mpmath.log(28) / 3
    assert third - float(E1N_LOWER) < h.lo and h.hi < third + float(E1N_UPPER_P0)
    C = make_curve(1, 1)
    h0 = canonical_height(C, Point(0, 1))
    h1 = canonical_height(C, Point(1, 1))
    assert _zero_in([(1, h0), (-9, h1)])


def test_error_radius_meets_precision():
    h = canonical_height(make_curve(10, 1), Point(-1, 10), precision=128)
    assert h.radius <= mpmath.mpf(2) ** -64


@pytest.mark.parametrize("C,P", [(make_curve(1, 2), Point(0, 2)), (make_curve(10, 1), Point(-1, 10))],
                         ids=["E1_2", "E10_1"])
def test_oracle_agreement(C, P):
    h = canonical_height(C, P)
    assert abs(doubling_limit_oracle(C, P, 12) - h.value) < 1e-3 + h.radius
    assert abs(doubling_limit_oracle(C, P, 14) - h.value) < 1e-4


def test_fast_oracle_matches_exact():
    C, P = make_curve(10, 1), Point(-1, 10)
    for k in (3, 6, 8):
        assert abs(doubling_limit_oracle(C, P, k, exact=False) - doubling_limit_oracle_exact(C, P, k)) < 1e-15
    assert doubling_limit_oracle(C, O, 5) == 0


def test_quadraticity_on_50_curves():
    rng = random.Random(11)
    for C in sample_curves(50, seed=5):
        P = rng.choice(lattice_points(C, bound=1))
        h1 = canonical_height(C, P)
        h2 = canonical_height(C, scalar_mul(C, P, 2))
        assert _zero_in([(1, h2), (-4, h1)])
        assert h2.radius + 4 * h1.radius < mpmath.mpf(2) ** -64


def test_parallelogram_law():
    C = make_curve(1, 30)
    pts = named_points(C)
    P, Q = pts["P0"], pts["Pminus1"]
    hs = [canonical_height(C, R) for R in (_add(C, P, Q), _add(C, P, scalar_mul(C, Q, -1)), P, Q)]
    assert _zero_in([(1, hs[0]), (1, hs[1]), (-2, hs[2]), (-2, hs[3])])


def test_regulator_examples():
    C = make_curve(1, 30)
    pts = named_points(C)
    P = pts["P0"]
    val, err = regulator(C, [P, scalar_mul(C, P, 2)])
    assert abs(val) <= err
    val, err = regulator(C, [P, pts["Pminus1"]])
    assert val - err > 0
    val, err = regulator(C, [P])
    h = canonical_height(C, P)
    assert abs(val - h.value) <= err + h.radius


def test_lower_bound_examples():
    assert lambda_lower_bound(make_curve(1, 27)) == pytest.approx(math.log(27) / 3 - 0.619, abs=1e-12)
    assert lambda_lower_bound(make_curve(10, 1)) == pytest.approx(math.log(10) / 2 - float(EM1_LOWER), abs=1e-12)
    with pytest.raises(NotApplicableError):
        lambda_lower_bound(make_curve(7, 1))
    with pytest.raises(NotApplicableError):
        lambda_lower_bound(make_curve(1, 20))


def test_e1n_window_small_sweep():
    for n in range(28, 60):
        C = make_curve(1, n)
        try:
            lo = lambda_lower_bound(C)
        except NotApplicableError:
            continue
        pts = named_points(C)
        third = mpmath.log(n) / 3
        h0 = canonical_height(C, pts["P0"])
        hm = canonical_height(C, pts["Pminus1"])
        assert lo < h0.lo and h0.hi < third + float(E1N_UPPER_P0)
        assert lo < hm.lo and hm.hi < third + float(E1N_UPPER_PM1)
