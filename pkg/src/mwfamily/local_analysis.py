"""Minimality, Kodaira symbols, the square-free condition and real-root bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .curve_core import Curve
from .errors import (IncompleteFactorizationError, IndeterminateError,
                     InternalContradictionError, PreconditionError)
from .number_core import DEFAULT_EFFORT, Factorization, factor, valuation
from .polyroots import bisect_sign_change, isolate_real_roots, refine, sturm_chain

ROOT_WIDTH = Fraction(1, 10 ** 10)


@dataclass(frozen=True)
class KodairaType:
    symbol: str                   # "I", "II", "III", "IV" or "Unsupported"
    k: int = 0                    # index for I_k
    reason: str = ""

    def __str__(self):
        if self.symbol == "I":
            return f"I{self.k}"
        if self.symbol == "Unsupported":
            return f"Unsupported({self.reason})"
        return self.symbol

    @property
    def is_good(self):
        return self.symbol == "I" and self.k == 0


@lru_cache(maxsize=2048)
def disc_factorization(C: Curve, effort_bound: int = DEFAULT_EFFORT) -> Factorization:
    return factor(C.disc, effort_bound)


def is_global_minimal(C: Curve, effort_bound: int = DEFAULT_EFFORT) -> bool:
    """True iff no prime has v(c4) >= 4, v(c6) >= 6 and v(Delta) >= 12.

    Such a prime divides gcd(c4, c6), so only that small number is factored.
    """
    primes = factor(math.gcd(C.c4, C.c6), effort_bound).primes()
    for p in primes:
        if (valuation(C.c4, p) < 4 or valuation(C.c6, p) < 6
                or valuation(C.disc, p) < 12):
            continue
        return False
    return True


def kodaira_type(C: Curve, p: int, debug: bool = False) -> KodairaType:
    """Reduction type at p from the congruence tables for this family."""
    m, n = C.m, C.n
    if p == 2:
        if m % 2 == 0 and n % 2 == 0:
            return KodairaType("Unsupported", reason="m and n both even")
        t = KodairaType("IV") if n % 2 else KodairaType("III")
    else:
        if math.gcd(m, n) != 1:
            raise PreconditionError(f"gcd(m, n) = {math.gcd(m, n)} > 1")
        if p == 3:
            if m % 3:
                t = KodairaType("I", 0)
            elif n % 9 in (1, 8):
                t = KodairaType("III")
            else:
                t = KodairaType("II")
        else:
            t = KodairaType("I", valuation(C.disc, p))
    if debug and p in (2, 3):
        other = rederive_small_prime_type(C, p)
        if other != t:
            raise InternalContradictionError(f"table gives {t}, shifts give {other} at p={p}")
    return t


# -- debug cross-check via explicit coordinate changes -----------------------

def transform(a, r, s, t):
    """Apply [1, r, s, t] to Weierstrass coefficients (a1, a2, a3, a4, a6)."""
    a1, a2, a3, a4, a6 = a
    return (a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1)


def b_invariants(a):
    a1, a2, a3, a4, a6 = a
    return (a1 * a1 + 4 * a2,
            2 * a4 + a1 * a3,
            a3 * a3 + 4 * a6,
            a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4)


def _divides(pk, x):
    return x % pk == 0


def rederive_small_prime_type(C: Curve, p: int) -> KodairaType:
    """Recompute the type at 2 or 3 from the shifted models and b6/b8 congruences."""
    m, n = C.m, C.n
    base = (0, 0, 0, -m * m, n * n)
    if p == 3:
        if C.disc % 3:
            return KodairaType("I", 0)
        shift = (-1, 0, 0)
    elif p == 2:
        if m % 2 == 0 and n % 2 == 0:
            return KodairaType("Unsupported", reason="m and n both even")
        if n % 2 and m % 2 == 0:
            shift = (0, 0, 1)
        elif n % 2:
            shift = (1, 1, 1)
        else:
            shift = (1, 1, 0)
    else:
        raise PreconditionError("only p = 2, 3 are re-derived")
    a = transform(base, *shift)
    b2, b4, b6, b8 = b_invariants(a)
    _, _, a3, a4, a6 = a
    if not (_divides(p, a3) and _divides(p, a4) and _divides(p, a6) and _divides(p, b2)):
        raise InternalContradictionError(f"shift {shift} does not move the singular point to 0")
    if not _divides(p * p, a6):
        return KodairaType("II")
    if not _divides(p ** 3, b8):
        return KodairaType("III")
    if not _divides(p ** 3, b6):
        return KodairaType("IV")
    raise InternalContradictionError("type beyond IV; not expected for this family")


def expected_disc_valuation(C: Curve, p: int, t: KodairaType) -> Optional[int]:
    """ord_p(Delta) implied by the type, where the family pins it down."""
    if t.symbol == "I":
        return t.k
    if p == 2:
        return 4 if C.n % 2 else 6
    if p == 3 and t.symbol in ("II", "III"):
        return 3
    return None


def squarefree_condition_holds(C: Curve, effort_bound: int = DEFAULT_EFFORT) -> bool:
    """True iff p^2 does not divide Delta for every prime p > 3."""
    try:
        fac = disc_factorization(C, effort_bound)
    except IncompleteFactorizationError as exc:
        raise IndeterminateError(f"cannot decide square-free condition for {C.label}") from exc
    return all(e <= 1 for p, e in fac.factors if p > 3)


def square_factors(C: Curve, effort_bound: int = DEFAULT_EFFORT):
    return [(p, e) for p, e in disc_factorization(C, effort_bound).factors if p > 3 and e > 1]


# -- real roots of f(x) = x^3 - m^2 x + n^2 --------------------------------

def icbrt(N: int) -> int:
    """floor(N^(1/3)) for N >= 0, by integer Newton iteration."""
    if N < 2:
        return N
    x = 1 << ((N.bit_length() + 2) // 3)
    while True:
        y = (2 * x + N // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x ** 3 > N:
        x -= 1
    while (x + 1) ** 3 <= N:
        x += 1
    return x


def cube_root_bracket(N: int, bits: int = 80):
    """Rational (lo, hi) with lo <= N^(1/3) <= hi and hi - lo = 2^-bits."""
    scaled = N << (3 * bits)
    c = icbrt(scaled)
    return Fraction(c, 1 << bits), Fraction(c + 1, 1 << bits)


@dataclass
class RootBounds:
    root_count: int
    roots: list                   # certified (lo, hi) brackets, ascending
    l_bracket: tuple              # bracket of l = n^(2/3)
    bounds: dict = field(default_factory=dict)   # name -> (lo, hi) rational enclosure
    holds: dict = field(default_factory=dict)    # name -> bool (bracketing verified)

    @property
    def smallest(self):
        return self.roots[0]

    @property
    def largest(self):
        return self.roots[-1]


@lru_cache(maxsize=1024)
def _roots(m: int, n: int, width: Fraction):
    f = [n * n, -m * m, 0, 1]
    intervals, exact, work = isolate_real_roots(f)
    if exact:
        raise InternalContradictionError("x^3 - m^2 x + n^2 has no rational roots for n > 0")
    chain = sturm_chain(work)
    out = []
    for lo, hi in intervals:
        got = refine(work, lo, hi, width, chain)
        out.append((got, got) if isinstance(got, Fraction) else got)
    return tuple(out)


def certified_roots(C: Curve, width: Fraction = ROOT_WIDTH):
    """Brackets of width < ``width`` around each real root of f, ascending."""
    return list(_roots(C.m, C.n, width))


def real_root_bounds(C: Curve, width: Fraction = ROOT_WIDTH) -> RootBounds:
    m, n = C.m, C.n
    l_lo, l_hi = cube_root_bracket(n * n)
    roots = certified_roots(C, width)
    one_root = 27 * n ** 4 - 4 * m ** 6 > 0
    rb = RootBounds(1 if one_root else 3, roots, (l_lo, l_hi))
    if len(roots) != rb.root_count:
        raise InternalContradictionError("root count disagrees with the discriminant sign")
    l3 = Fraction(n * n)
    if one_root:
        lo_r, _ = roots[0]
        # -l - m^2/(3l), enclosed over the bracket of l
        rb.bounds["lower_via_l"] = (-l_hi - Fraction(m * m) / (3 * l_lo),
                                    -l_lo - Fraction(m * m) / (3 * l_hi))
        v = -m - l3 / (2 * m * m)
        rb.bounds["lower_via_m"] = (v, v)
        rb.holds = {k: b[1] < lo_r for k, b in rb.bounds.items()}
    elif m ** 3 >= 3 * n * n:
        (a_lo, a_hi), (b_lo, b_hi), (g_lo, g_hi) = roots
        alpha_lo = -m - l3 / (2 * m * m)
        beta_hi = 2 * l3 / (m * m)
        gamma_lo = m - l3 / (m * m)
        rb.bounds = {"alpha_lower": (alpha_lo, alpha_lo),
                     "beta_upper": (beta_hi, beta_hi),
                     "gamma_lower": (gamma_lo, gamma_lo)}
        rb.holds = {"alpha_lower": alpha_lo < a_lo,
                    "alpha_negative": a_hi < 0,
                    "beta_positive": b_lo > 0,
                    "beta_upper": b_hi < beta_hi,
                    "beta_gamma_gap": beta_hi <= gamma_lo,
                    "gamma_lower": gamma_lo < g_lo}
    return rb
