"""The family E_{m,n}: y^2 = x^3 - m^2 x + n^2 and exact point arithmetic."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError


@dataclass(frozen=True)
class Curve:
    m: int
    n: int
    a4: int = field(init=False)
    a6: int = field(init=False)
    b2: int = field(init=False)
    b4: int = field(init=False)
    b6: int = field(init=False)
    b8: int = field(init=False)
    c4: int = field(init=False)
    c6: int = field(init=False)
    disc: int = field(init=False)

    def __post_init__(self):
        m, n = self.m, self.n
        vals = dict(a4=-m * m, a6=n * n, b2=0, b4=-2 * m * m, b6=4 * n * n,
                    b8=-m ** 4, c4=48 * m * m, c6=-864 * n * n,
                    disc=-16 * (27 * n ** 4 - 4 * m ** 6))
        for k, v in vals.items():
            object.__setattr__(self, k, v)

    @property
    def label(self):
        return f"E_{{{self.m},{self.n}}}"

    def f(self, x):
        """Right-hand side x^3 - m^2 x + n^2."""
        return x * x * x + self.a4 * x + self.a6


@dataclass(frozen=True)
class Point:
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise DomainError("a point needs both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


O = Point()


def make_curve(m: int, n: int) -> Curve:
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise DomainError(f"m and n must be positive integers, got ({m}, {n})")
    C = Curve(int(m), int(n))
    if C.disc == 0:
        raise DomainError("singular curve")
    return C


def contains(C: Curve, P: Point) -> bool:
    if P.is_infinity:
        return True
    return P.y * P.y == C.f(P.x)


def _check(C, *points):
    for P in points:
        if not contains(C, P):
            raise DomainError(f"{P} is not on {C.label}")


def negate(C: Curve, P: Point) -> Point:
    _check(C, P)
    if P.is_infinity:
        return P
    return Point(P.x, -P.y)


def _add(C, P, Q):
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y != Q.y or P.y == 0:
            return O
        lam = (3 * P.x * P.x + C.a4) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    return Point(x3, lam * (P.x - x3) - P.y)


def add(C: Curve, P: Point, Q: Point) -> Point:
    """Chord-tangent sum."""
    _check(C, P, Q)
    return _add(C, P, Q)


def sub(C: Curve, P: Point, Q: Point) -> Point:
    return add(C, P, negate(C, Q))


def scalar_mul(C: Curve, P: Point, k: int) -> Point:
    """k*P by binary double-and-add."""
    _check(C, P)
    if k < 0:
        P, k = (P if P.is_infinity else Point(P.x, -P.y)), -k
    R, T = O, P
    while k:
        if k & 1:
            R = _add(C, R, T)
        k >>= 1
        if k:
            T = _add(C, T, T)
    return R


def psi3(C: Curve, x: Fraction) -> Fraction:
    return 3 * x ** 4 - 6 * C.m ** 2 * x ** 2 + 12 * C.n ** 2 * x - C.m ** 4


def division_poly_eval(C: Curve, which: str, P: Point) -> Fraction:
    """Value of psi_2 = 2y or psi_3 = 3x^4 - 6m^2x^2 + 12n^2x - m^4 at P."""
    if P.is_infinity:
        raise DomainError("division polynomials are not evaluated at O")
    if which in ("psi2", 2):
        return 2 * P.y
    if which in ("psi3", 3):
        return psi3(C, P.x)
    raise DomainError(f"unknown division polynomial {which!r}")


def u_of_x(C: Curve, x: Fraction) -> Fraction:
    # x^4 - b4 x^2 - 2 b6 x - b8 = (x^2 + m^2)^2 - 8 n^2 x
    return (x * x + C.m ** 2) ** 2 - 8 * C.n ** 2 * x


def uz_eval(C: Curve, P: Point):
    """(u(P), z(P)) with z = u / x^4; z is None when x(P) = 0."""
    if P.is_infinity:
        raise DomainError("u is not defined at O")
    u = u_of_x(C, P.x)
    z = None if P.x == 0 else u / P.x ** 4
    return u, z


def x_double(C: Curve, x: Fraction) -> Optional[Fraction]:
    """x(2Q) from x(Q); None when 2Q = O."""
    den = 4 * C.f(x)
    if den == 0:
        return None
    return u_of_x(C, x) / den


def kl_identity_residual(C: Curve, P: Point) -> Fraction:
    """16 k psi_3 - 4 kl_poly psi_2^2 - Delta, which vanishes identically on C."""
    _check(C, P)
    if P.is_infinity:
        raise DomainError("identity is evaluated at affine points only")
    x = P.x
    k = 3 * x * x + 4 * C.a4
    kl_poly = 9 * x ** 3 + 21 * C.a4 * x + 27 * C.a6
    psi2 = 2 * P.y
    return 16 * k * psi3(C, x) - 4 * kl_poly * psi2 * psi2 - C.disc


def named_points(C: Curve) -> dict:
    pts = {
        "P0": Point(0, C.n),
        "Pplus1": Point(C.m, C.n),
        "Pminus1": Point(-C.m, C.n),
    }
    if C.n == 1:
        pts["P2"] = Point(-1, C.m)
    return pts
