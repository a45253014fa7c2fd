"""Canonical heights as a sum of local heights, with rigorous error radii.

Normalization: the archimedean part is Tate's series on a model whose real
points all have positive x (or the modified series that only needs this on
the identity component), and the finite parts are exact rational multiples
of log p.  With this convention the canonical height is half the limit of
log H(x(2^k P)) / 4^k, which is what :func:`doubling_limit_oracle` computes
independently.

The discriminant terms ord_p(Delta)/12 * log p of the finite local heights
cancel against the matching term of the archimedean one, so neither side
carries them; :class:`HeightValue` stores only what survives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import gmpy2
from mpmath import iv, mp, mpf

from .curve_core import Curve, Point, O, _add, _check, psi3, scalar_mul
from .errors import (DomainError, InternalContradictionError, NotApplicableError,
                     StrategyError, UnsupportedReductionError)
from .local_analysis import (certified_roots, cube_root_bracket, disc_factorization,
                             is_global_minimal, kodaira_type, squarefree_condition_holds)
from .number_core import DEFAULT_EFFORT, rational_valuation

DEFAULT_TERMS = 40
DEFAULT_PREC = 128

# constants of the closed-form lower and upper height bounds
E1N_LOWER = Fraction("0.619")
E1N_UPPER_P0 = Fraction("0.716")
E1N_UPPER_PM1 = Fraction("0.541")
EM1_LOWER = Fraction("0.509")
EM1_UPPER = Fraction("0.290")
EM1_SUM_LOWER = Fraction("0.634")
EM1_SUM_UPPER = Fraction("0.068")

# range of z on the shifted E_{1,n} model for l >= 9, proved by certify_shifted_z_range
SHIFTED_Z_MIN = Fraction("0.098")
SHIFTED_Z_MAX = Fraction("9.075")


# -- interval helpers ----------------------------------------------------------

class _prec:
    """Temporarily set the precision of mpmath's interval context."""

    def __init__(self, bits):
        self.bits = bits

    def __enter__(self):
        self.saved = iv.prec
        iv.prec = self.bits

    def __exit__(self, *exc):
        iv.prec = self.saved


def _ends(v):
    a, b = v._mpi_
    return mp.make_mpf(a), mp.make_mpf(b)


def _ivq(q: Fraction):
    """Outward-rounded enclosure of a rational."""
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _meet(v, lo, hi):
    a, b = _ends(v)
    a, b = max(a, lo), min(b, hi)
    if a > b:
        raise InternalContradictionError("enclosure disjoint from its certified range")
    return iv.mpf([a, b])


def _mid_rad(v, bits=None):
    """Midpoint and a radius that covers the interval."""
    a, b = _ends(v)
    bits = bits or max(iv.prec, DEFAULT_PREC)
    # endpoints carry at most ``bits`` bits, so these differences are exact
    with mp.workprec(2 * bits + 64):
        mid = (a + b) / 2
        rad = max(b - mid, mid - a)
    return mid, rad


# -- value type --------------------------------------------------------------

@dataclass(frozen=True)
class HeightValue:
    """sum(coeff * log base) + arch, where arch lies in [mid - radius, mid + radius].

    Bases are positive integers; a base may be composite (for instance the
    square root of a denominator), which is still an exact log-linear form.
    """

    exact_part: tuple = ()            # ((base, Fraction coeff), ...)
    arch_mid: mpf = mpf(0)
    arch_radius: mpf = mpf(0)
    prec: int = DEFAULT_PREC

    def interval(self):
        with _prec(self.prec + 20):
            acc = iv.mpf(self.arch_mid) + iv.mpf([-self.arch_radius, self.arch_radius])
            for base, c in self.exact_part:
                acc += _ivq(c) * iv.log(iv.mpf(base))
            return acc

    @property
    def value(self) -> mpf:
        return _mid_rad(self.interval(), self.prec + 20)[0]

    @property
    def radius(self) -> mpf:
        return _mid_rad(self.interval(), self.prec + 20)[1]

    @property
    def lo(self) -> mpf:
        return _ends(self.interval())[0]

    @property
    def hi(self) -> mpf:
        return _ends(self.interval())[1]

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return f"{mp.nstr(self.value, 20)} +/- {mp.nstr(self.radius, 3)}"


ZERO = HeightValue()


# -- naive height ------------------------------------------------------------

def naive_x_height(P: Point) -> float:
    """log max(|num x|, den x); 0 at O."""
    if P.is_infinity:
        return 0.0
    return math.log(max(abs(P.x.numerator), P.x.denominator, 1))


# -- archimedean part ----------------------------------------------------------

@dataclass(frozen=True)
class ArchStrategy:
    """Which series to use and the translation x' = x + shift."""

    kind: str                 # "shifted" (Tate) or "modified"
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("shifted", "modified"):
            raise DomainError(f"unknown strategy kind {self.kind!r}")
        object.__setattr__(self, "shift", Fraction(self.shift))

    @classmethod
    def shifted(cls, s) -> "ArchStrategy":
        return cls("shifted", s)

    @classmethod
    def modified(cls, s=0) -> "ArchStrategy":
        return cls("modified", s)

    def __str__(self):
        name = "ShiftedTate" if self.kind == "shifted" else "ModifiedTate"
        return f"{name}(shift={self.shift})"


def shifted_b_invariants(C: Curve, s: Fraction):
    """(b2, b4, b6, b8) of y^2 = f(x' - s)."""
    s = Fraction(s)
    m2, n2 = C.m * C.m, C.n * C.n
    a2 = -3 * s
    a4 = 3 * s * s - m2
    a6 = -s ** 3 + m2 * s + n2
    return 4 * a2, 2 * a4, 4 * a6, 4 * a2 * a6 - a4 * a4


def _z_poly_t(C: Curve, s: Fraction):
    """Coefficients of z as a polynomial in t = 1/x', increasing degree."""
    _, b4, b6, b8 = shifted_b_invariants(C, s)
    return [Fraction(1), Fraction(0), -b4, -2 * b6, -b8]


def _q_horner(coeffs, lo: Fraction, hi: Fraction):
    """Rational interval enclosure of a polynomial over [lo, hi] (lo >= 0)."""
    acc_lo = acc_hi = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        cands = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo, acc_hi = min(cands) + c, max(cands) + c
    return acc_lo, acc_hi


def _peval_q(coeffs, t):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def certify_poly_range(coeffs, lo: Fraction, hi: Fraction, rel=Fraction(1, 64), max_depth=60):
    """Certified (min_lower, max_upper) of a polynomial on [lo, hi].

    Bisects until each piece's enclosure is within ``rel`` of the point
    values at its ends, using a mean-value form with an interval derivative.
    """
    deriv = [i * coeffs[i] for i in range(1, len(coeffs))]
    ends = [_peval_q(coeffs, lo), _peval_q(coeffs, hi)]
    best_lo, best_hi = min(ends), max(ends)
    zmin, zmax = best_lo, best_hi
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        c = (a + b) / 2
        zc = _peval_q(coeffs, c)
        d_lo, d_hi = _q_horner(deriv, a, b) if deriv else (Fraction(0), Fraction(0))
        h = (b - a) / 2
        spread = max(abs(d_lo), abs(d_hi)) * h
        e_lo, e_hi = zc - spread, zc + spread
        if e_lo >= zmin and e_hi <= zmax:
            continue
        best_lo, best_hi = min(best_lo, zc), max(best_hi, zc)
        tol = rel * max(abs(best_lo), Fraction(1, 10 ** 6))
        if depth >= max_depth or (e_lo >= best_lo - tol and e_hi <= best_hi + tol):
            zmin, zmax = min(zmin, e_lo), max(zmax, e_hi)
            continue
        stack.append((a, c, depth + 1))
        stack.append((c, b, depth + 1))
    return zmin, zmax


@lru_cache(maxsize=4096)
def z_bounds(C: Curve, strategy: ArchStrategy):
    """Certified rational (zmin, zmax) of z over the identity component.

    Every doubled point 2^k P (k >= 1) lies on the identity component, where
    x' >= (largest root) + shift, so t = 1/x' ranges over [0, t_max].
    """
    roots = certified_roots(C)
    left = roots[-1][0] + strategy.shift
    if left <= 0:
        raise StrategyError(f"{strategy} leaves x' <= 0 on the identity component")
    lo, hi = certify_poly_range(_z_poly_t(C, strategy.shift), Fraction(0), 1 / left)
    if lo <= 0:
        raise StrategyError(f"z is not bounded away from 0 under {strategy}")
    return lo, hi


def check_strategy(C: Curve, strategy: ArchStrategy) -> None:
    roots = certified_roots(C)
    if strategy.kind == "shifted":
        if roots[0][0] + strategy.shift <= 0:
            raise StrategyError(f"{strategy}: the smallest real root is not moved past 0")
    elif roots[-1][0] + strategy.shift <= 0:
        raise StrategyError(f"{strategy}: the identity component is not moved past 0")


def default_strategy(C: Curve) -> ArchStrategy:
    roots = certified_roots(C)
    if len(roots) == 3:
        return ArchStrategy.modified(0)
    if C.m == 1 and C.n >= 27:
        # 2l + 1/(3l) with l = n^(2/3), rounded up to a nearby rational
        l_lo, l_hi = cube_root_bracket(C.n * C.n)
        return ArchStrategy.shifted(2 * l_hi + 1 / (3 * l_lo))
    return ArchStrategy.shifted(math.floor(-roots[0][0]) + 1)


@dataclass
class ArchHeight:
    value: mpf
    error: mpf
    strategy: ArchStrategy
    z_seen: tuple = ()          # (min, max) of the z midpoints met along the series

    def __iter__(self):
        return iter((self.value, self.error))


def _double_q(b, x: Fraction) -> Optional[Fraction]:
    b2, b4, b6, b8 = b
    den = 4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6
    if den == 0:
        return None
    return (x ** 4 - b4 * x * x - 2 * b6 * x - b8) / den


def _arch_interval(C, P, strategy, terms, wp, zlo, zhi):
    b = shifted_b_invariants(C, strategy.shift)
    b2, b4, b6, b8 = b
    x = P.x + strategy.shift
    exact_bits = 3 * wp
    log_zlo, log_zhi = iv.log(_ivq(zlo)), iv.log(_ivq(zhi))
    lzl, _ = _ends(log_zlo)
    _, lzh = _ends(log_zhi)
    seen = [None, None]

    def note(zv):
        a, c = _ends(zv)
        mid = (a + c) / 2
        seen[0] = mid if seen[0] is None else min(seen[0], mid)
        seen[1] = mid if seen[1] is None else max(seen[1], mid)

    if strategy.kind == "shifted":
        if x <= 0:
            raise StrategyError(f"x' = {x} <= 0 under {strategy}")
        total = iv.log(_ivq(x)) / 2
        first = 0
    else:
        u = x ** 4 - b4 * x * x - 2 * b6 * x - b8
        if u <= 0:
            raise StrategyError(f"u(P') = {u} <= 0 under {strategy}")
        total = iv.log(_ivq(u)) / 8
        x = _double_q(b, x)
        first = 1
    ivb = [_ivq(v) for v in b]
    xi = None
    weight = iv.mpf(1) / 4 ** first / 8
    for k in range(first, terms + 1):
        if xi is None and (x.numerator.bit_length() + x.denominator.bit_length()) > exact_bits:
            xi = _ivq(x)
        if xi is None:
            z = 1 - b4 / x ** 2 - 2 * b6 / x ** 3 - b8 / x ** 4
            if z <= 0:
                raise StrategyError(f"z <= 0 at step {k} under {strategy}")
            zv = _ivq(z)
            note(zv)
            lz = iv.log(zv)
            if k >= 1:
                lz = _meet(lz, lzl, lzh)
            x = _double_q(b, x)
            if x is None:
                # 2^(k+1) P = O; the remaining terms are not defined
                raise StrategyError("point of finite order reached")
        else:
            a, c = _ends(xi)
            if a <= 0:
                lz = iv.mpf([lzl, lzh])
            else:
                t = 1 / xi
                zv = 1 - ivb[1] * t ** 2 - 2 * ivb[2] * t ** 3 - ivb[3] * t ** 4
                note(zv)
                za, _ = _ends(zv)
                lz = iv.mpf([lzl, lzh]) if za <= 0 else _meet(iv.log(zv), lzl, lzh)
                xi = ((xi ** 4 - ivb[1] * xi ** 2 - 2 * ivb[2] * xi - ivb[3])
                      / (4 * xi ** 3 + ivb[0] * xi ** 2 + 2 * ivb[1] * xi + ivb[2]))
        total += weight * lz
        weight /= 4
    # tail: (1/8) sum_{k > terms} 4^-k log z, with log z in [lzl, lzh]
    total += iv.mpf([lzl, lzh]) / (24 * iv.mpf(4) ** terms)
    return total, tuple(seen)


def lambda_arch(C: Curve, P: Point, strategy: Optional[ArchStrategy] = None,
                terms: int = DEFAULT_TERMS, precision: int = DEFAULT_PREC) -> ArchHeight:
    """Archimedean local height (discriminant term omitted) with a rigorous error."""
    _check(C, P)
    if P.is_infinity or P.y == 0:
        raise DomainError("the archimedean series needs P outside E[2]")
    strategy = strategy or default_strategy(C)
    check_strategy(C, strategy)
    zlo, zhi = z_bounds(C, strategy)
    target = mpf(2) ** (-(precision // 2))
    wp = precision + 2 * terms + 32
    for _ in range(6):
        with _prec(wp):
            total, seen = _arch_interval(C, P, strategy, terms, wp, zlo, zhi)
            mid, rad = _mid_rad(total, wp)
        if rad <= target or 4 ** -terms > target:
            return ArchHeight(mid, rad, strategy, seen)
        wp *= 2
    return ArchHeight(mid, rad, strategy, seen)


# -- finite part ---------------------------------------------------------------

def _ord(q, p) -> float:
    """p-adic order of a rational, +inf at 0."""
    return math.inf if q == 0 else rational_valuation(q, p)


def _reduces_singular(C: Curve, P: Point, p: int) -> bool:
    if _ord(P.x, p) < 0:
        return False
    g = 3 * P.x * P.x - C.m * C.m
    if g == 0 or P.y == 0:
        return True
    return rational_valuation(g, p) > 0 and rational_valuation(2 * P.y, p) > 0


def _singular_correction(C: Curve, P: Point, p: int, t) -> Fraction:
    """Coefficient of log p replacing the nonsingular term at a singular point."""
    if t.symbol == "IV":
        return Fraction(-rational_valuation(2 * P.y, p), 3)
    if t.symbol == "III":
        return Fraction(-_ord(psi3(C, P.x), p), 8)
    if t.symbol == "II":
        raise InternalContradictionError(f"singular reduction at p={p} on a type II fibre")
    if t.symbol == "I" and t.k <= 1:
        raise InternalContradictionError(f"singular reduction at p={p} on an I{t.k} fibre")
    raise UnsupportedReductionError(f"local height at p={p} for type {t}")


def lambda_nonarch(C: Curve, P: Point, p: int) -> tuple:
    """Local height at p as ((p, coefficient),), omitting ord_p(Delta)/12.

    Add ``valuation(C.disc, p) / 12`` to the coefficient for the full local
    height in the usual normalization.
    """
    _check(C, P)
    if P.is_infinity:
        raise DomainError("local heights are taken at affine points")
    t = kodaira_type(C, p)
    if t.symbol == "I" and t.k >= 2:
        raise UnsupportedReductionError(f"type I{t.k} at p={p}")
    if t.symbol == "Unsupported":
        raise UnsupportedReductionError(t.reason)
    if not t.is_good and _reduces_singular(C, P, p):
        return ((p, _singular_correction(C, P, p, t)),)
    return ((p, Fraction(max(0, -_ord(P.x, p)), 2)),)


def finite_part(C: Curve, P: Point, effort_bound: int = DEFAULT_EFFORT) -> tuple:
    """Sum of the finite local heights as (base, coeff) pairs."""
    if math.gcd(C.m, C.n) != 1:
        raise UnsupportedReductionError("local tables assume gcd(m, n) = 1")
    if not is_global_minimal(C, effort_bound):
        raise UnsupportedReductionError(f"{C.label} is not a minimal model")
    d = math.isqrt(P.x.denominator)
    parts = {}
    if d > 1:
        parts[d] = Fraction(1)          # (1/2) log den(x) = log d
    fac = disc_factorization(C, effort_bound)
    for p, e in fac.factors:
        if not _reduces_singular(C, P, p):
            continue
        t = kodaira_type(C, p)
        corr = _singular_correction(C, P, p, t)
        # replace the nonsingular contribution of p by the singular one
        parts[p] = parts.get(p, Fraction(0)) + corr
        # P is p-integral here, so p did not divide d
    return tuple(sorted((b, c) for b, c in parts.items() if c))


def _is_two_torsion(P):
    return P.is_infinity or P.y == 0


@lru_cache(maxsize=8192)
def _canonical_height(C, P, precision, terms, strategy):
    if _is_two_torsion(P):
        return HeightValue(prec=precision)
    exact = finite_part(C, P)
    try:
        arch = lambda_arch(C, P, strategy, terms, precision)
    except StrategyError:
        if strategy is None:
            raise
        arch = lambda_arch(C, P, None, terms, precision)
    return HeightValue(exact, arch.value, arch.error, precision)


def canonical_height(C: Curve, P: Point, precision: int = DEFAULT_PREC,
                     terms: int = DEFAULT_TERMS,
                     strategy: Optional[ArchStrategy] = None) -> HeightValue:
    """Canonical height of P; the point at infinity and 2-torsion give 0."""
    _check(C, P)
    return _canonical_height(C, P, precision, terms, strategy)


# -- independent oracle ----------------------------------------------------------

def _exact_doubling_height(C: Curve, P: Point, k: int) -> Optional[int]:
    """(numerator, denominator) of x(2^k P) by exact big-integer doubling, or None at O."""
    a, b = gmpy2.mpz(-C.m * C.m), gmpy2.mpz(C.n * C.n)
    N, D = gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator)
    for _ in range(k):
        A, B, Cc = N * N, D * D, N * D
        Nn = (A - a * B) ** 2 - 8 * b * Cc * B
        Dn = 4 * (Cc * (A + a * B) + b * B * B)
        if Dn == 0:
            return None
        g = gmpy2.gcd(Nn, Dn)
        N, D = Nn // g, Dn // g
        if D < 0:
            N, D = -N, -D
    return N, D


def doubling_limit_oracle_exact(C: Curve, P: Point, k: int) -> mpf:
    """h(x(2^k P)) / (2 * 4^k) with exact arithmetic; practical for k <= 10."""
    _check(C, P)
    if P.is_infinity:
        return mpf(0)
    got = _exact_doubling_height(C, P, k)
    if got is None:
        return mpf(0)
    N, D = got
    h = max(mp.log(mpf(int(abs(N)))) if N else mpf(0), mp.log(mpf(int(D))))
    return h / (2 * mpf(4) ** k)


def _fast_doubling_interval(C: Curve, P: Point, k: int, wp: int):
    """Enclosure of log max(|N_k|, D_k) without forming N_k, D_k.

    Tracks x_k as an interval, log D_k as an interval, and N_k, D_k modulo
    high powers of the primes that can divide gcd(D^4 u(x), 4 D^4 f(x)) --
    these divide Res(u, 4f) = Delta^2, so only primes of Delta occur.
    """
    fac = disc_factorization(C)
    mods = {}
    for p, e in fac.factors:
        E = (k + 1) * (2 * e + 1) + 1
        mods[p] = (p ** E, 2 * e)
    a, bb = -C.m * C.m, C.n * C.n
    N0, D0 = P.x.numerator, P.x.denominator
    res = {p: (N0 % q, D0 % q, q) for p, (q, _) in mods.items()}
    with _prec(wp):
        x = _ivq(P.x)
        L = iv.log(iv.mpf(D0))
        ia, ib = iv.mpf(a), iv.mpf(bb)
        for _ in range(k):
            u = x ** 4 - 2 * ia * x ** 2 - 8 * ib * x + ia * ia
            f = x ** 3 + ia * x + ib
            if 0 in u or 0 in f:
                return None
            # valuations of the common factor g at each bad prime
            vg = {}
            new = {}
            for p, (N, D, q) in res.items():
                A, B, Cc = N * N % q, D * D % q, N * D % q
                F = ((A - a * B) ** 2 - 8 * bb * Cc * B) % q
                G = 4 * (Cc * (A + a * B) + bb * B * B) % q
                vF = _val_mod(F, p, q)
                vG = _val_mod(G, p, q)
                v = min(vF, vG)
                if v > mods[p][1]:
                    return None
                vg[p] = v
                new[p] = (F, G, q)
            log_g = iv.mpf(0)
            for p, v in vg.items():
                if v:
                    log_g += v * iv.log(iv.mpf(p))
            L = iv.log(iv.mpf(4)) + 4 * L + iv.log(abs(f)) - log_g
            x = u / (4 * f)
            # divide F, G by g in every residue ring
            for p, (F, G, q) in new.items():
                qq = q // p ** vg[p]
                F, G = F // p ** vg[p] % qq, G // p ** vg[p] % qq
                for r, v in vg.items():
                    if r != p and v:
                        inv = pow(r ** v, -1, qq)
                        F, G = F * inv % qq, G * inv % qq
                res[p] = (F, G, qq)
        xa, xb = _ends(abs(x))
        La, Lb = _ends(L)
        lo = La + (mp.log(xa) if xa > 1 else 0)
        hi = Lb + (mp.log(xb) if xb > 1 else 0)
        return lo, hi


def _val_mod(r, p, q):
    """p-adic valuation of an integer known modulo q = p^E (capped at E)."""
    if r == 0:
        return q.bit_length()          # at least E; callers only use it in a min
    v = 0
    while r % p == 0:
        r //= p
        v += 1
    return v


def doubling_limit_oracle(C: Curve, P: Point, k: int, exact: Optional[bool] = None) -> mpf:
    """Approximation h(x(2^k P)) / (2 * 4^k) to the canonical height.

    For large k the height of x(2^k P) has ~4^k digits; by default k > 8 uses
    a rigorous interval recurrence for log H instead of forming the integers.
    """
    _check(C, P)
    if P.is_infinity:
        return mpf(0)
    if exact is None:
        exact = k <= 8
    if not exact and P.y != 0:
        got = _fast_doubling_interval(C, P, k, 64 + 4 * k)
        if got is not None:
            lo, hi = got
            return (lo + hi) / 2 / (2 * mpf(4) ** k)
    return doubling_limit_oracle_exact(C, P, k)


# -- pairing and regulator -------------------------------------------------------

def _height_iv(C, P, precision, terms):
    return canonical_height(C, P, precision, terms).interval()


def pairing_interval(C: Curve, P: Point, Q: Point, precision=DEFAULT_PREC, terms=DEFAULT_TERMS):
    """<P, Q> = (h(P+Q) - h(P) - h(Q)) / 2 as an interval."""
    S = _add(C, P, Q)
    with _prec(precision + 20):
        return (_height_iv(C, S, precision, terms) - _height_iv(C, P, precision, terms)
                - _height_iv(C, Q, precision, terms)) / 2


def gram_matrix(C: Curve, points: list, precision=DEFAULT_PREC, terms=DEFAULT_TERMS):
    r = len(points)
    G = [[None] * r for _ in range(r)]
    for i in range(r):
        G[i][i] = _height_iv(C, points[i], precision, terms)
        for j in range(i):
            G[i][j] = G[j][i] = pairing_interval(C, points[i], points[j], precision, terms)
    return G


def _det(M):
    r = len(M)
    if r == 1:
        return M[0][0]
    total = iv.mpf(0)
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def regulator_interval(C: Curve, points: list, precision=DEFAULT_PREC, terms=DEFAULT_TERMS):
    if not 1 <= len(points) <= 4:
        raise DomainError("the regulator is computed for 1 to 4 points")
    for P in points:
        _check(C, P)
    G = gram_matrix(C, points, precision, terms)
    with _prec(precision + 20):
        return _det(G)


def regulator(C: Curve, points: list, precision: int = DEFAULT_PREC,
              terms: int = DEFAULT_TERMS):
    """(value, error) of the height-pairing determinant."""
    return _mid_rad(regulator_interval(C, points, precision, terms), precision + 20)


# -- lower bound for heights of non-torsion points --------------------------------

def lambda_lower_bound_exact(C: Curve):
    """The closed-form lower bound as (coefficient of log, parameter, constant).

    The bound is coeff * log(parameter) - constant.
    """
    if C.m == 1 and C.n >= 27:
        ok, param, coeff, const = True, C.n, Fraction(1, 3), E1N_LOWER
    elif C.n == 1 and C.m >= 10:
        ok, param, coeff, const = True, C.m, Fraction(1, 2), EM1_LOWER
    else:
        raise NotApplicableError(f"no lower bound is proved for {C.label}")
    if not squarefree_condition_holds(C):
        raise NotApplicableError(f"{C.label} fails the square-free condition")
    return coeff, param, const


def lambda_lower_bound(C: Curve) -> mpf:
    coeff, param, const = lambda_lower_bound_exact(C)
    return _ends(lambda_lower_bound_interval(C, (coeff, param, const)))[0]


def lambda_lower_bound_interval(C: Curve, parts=None, prec: int = DEFAULT_PREC):
    coeff, param, const = parts or lambda_lower_bound_exact(C)
    with _prec(prec):
        return _ivq(coeff) * iv.log(iv.mpf(param)) - _ivq(const)


# -- the shifted E_{1,n} model written in l = n^(2/3) --------------------------------

def e1n_shift(l):
    return 2 * l + 1 / (3 * l)


def shifted_z(x, l):
    """z at x' = x on the shifted model of E_{1,n}, written with l = n^(2/3).

    Works with any numeric type supporting field operations (Fraction, mpf, iv).
    """
    t = l / x
    w = 1 / (l * l)
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    return (1 - 24 * t2 + 56 * t3 - 24 * t4
            + w * (-6 * t2 + 16 * t3 - 4 * t4)
            + w * w * (Fraction(-2, 3) * t2 + Fraction(8, 3) * t3 + t4)
            + w ** 3 * (Fraction(8, 27) * t3 - Fraction(2, 9) * t4)
            - w ** 4 * t4 / 27)


def shifted_z_tw(t, w):
    """The same z as a polynomial in t = l/x and w = 1/l^2 (exact rationals)."""
    t, w = Fraction(t), Fraction(w)
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    return (1 - 24 * t2 + 56 * t3 - 24 * t4
            + w * (-6 * t2 + 16 * t3 - 4 * t4)
            + w * w * (Fraction(-2, 3) * t2 + Fraction(8, 3) * t3 + t4)
            + w ** 3 * (Fraction(8, 27) * t3 - Fraction(2, 9) * t4)
            - w ** 4 * t4 / 27)


def _z_tw_grad_box(t0, t1, w0, w1):
    """Interval enclosures of dz/dt and dz/dw over a box with t, w >= 0."""
    def rng(terms):
        lo = hi = Fraction(0)
        for c, pt, pw in terms:
            vals = [c * tt ** pt * ww ** pw for tt in (t0, t1) for ww in (w0, w1)]
            lo += min(vals)
            hi += max(vals)
        return lo, hi
    # monomials c t^i w^j of z
    mono = [(-24, 2, 0), (56, 3, 0), (-24, 4, 0),
            (-6, 2, 1), (16, 3, 1), (-4, 4, 1),
            (Fraction(-2, 3), 2, 2), (Fraction(8, 3), 3, 2), (1, 4, 2),
            (Fraction(8, 27), 3, 3), (Fraction(-2, 9), 4, 3), (Fraction(-1, 27), 4, 4)]
    dt = [(c * i, i - 1, j) for c, i, j in mono]
    dw = [(c * j, i, j - 1) for c, i, j in mono if j]
    return rng(dt), rng(dw)


def certify_shifted_z_range(lower=SHIFTED_Z_MIN, upper=SHIFTED_Z_MAX, max_boxes=200000):
    """Check lower < z < upper on t in (0, 1], w in (0, 1/81] by box bisection.

    Each box is bounded by a mean-value form around its centre, so the result
    is rigorous on the closed box [0, 1] x [0, 1/81].  Returns
    (holds, boxes_examined).
    """
    lower, upper = Fraction(lower), Fraction(upper)
    stack = [(Fraction(0), Fraction(1), Fraction(0), Fraction(1, 81))]
    seen = 0
    while stack:
        t0, t1, w0, w1 = stack.pop()
        seen += 1
        if seen > max_boxes:
            return False, seen
        tc, wc = (t0 + t1) / 2, (w0 + w1) / 2
        zc = shifted_z_tw(tc, wc)
        if not lower < zc < upper:
            return False, seen
        (gt_lo, gt_hi), (gw_lo, gw_hi) = _z_tw_grad_box(t0, t1, w0, w1)
        spread = (max(abs(gt_lo), abs(gt_hi)) * (t1 - t0) / 2
                  + max(abs(gw_lo), abs(gw_hi)) * (w1 - w0) / 2)
        if lower < zc - spread and zc + spread < upper:
            continue
        if (t1 - t0) >= 32 * (w1 - w0) * 81:
            stack += [(t0, tc, w0, w1), (tc, t1, w0, w1)]
        else:
            stack += [(t0, tc, w0, wc), (tc, t1, w0, wc), (t0, tc, wc, w1), (tc, t1, wc, w1)]
    return True, seen


def scan_shifted_z_grid(nt: int = 2001, nw: int = 201):
    """Floating-point extrema of z over a (t, w) grid via the compiled kernel."""
    import numpy as np
    from . import _kernels
    ts = np.linspace(1e-12, 1.0, nt)
    ws = np.linspace(1e-12, 1.0 / 81.0, nw)
    zmin, i0, j0, zmax, i1, j1 = _kernels.z_grid_extrema(ts, ws)
    return {"zmin": zmin, "argmin": (ts[i0], ws[j0]), "zmax": zmax, "argmax": (ts[i1], ws[j1])}


def multiples_heights(C: Curve, P: Point, ks: Iterable[int], **kw):
    return {k: canonical_height(C, scalar_mul(C, P, k), **kw) for k in ks}
