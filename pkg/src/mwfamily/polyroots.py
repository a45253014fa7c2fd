"""Exact real-root isolation and rational roots of integer polynomials.

Polynomials are coefficient lists in increasing degree: ``[c0, c1, ..., cd]``.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .number_core import divisors, factor


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def primitive(p):
    """Scale rational coefficients to a primitive integer polynomial with positive lead."""
    p = trim(Fraction(c) for c in p)
    if not p:
        return []
    den = 1
    for c in p:
        den = den * c.denominator // math.gcd(den, c.denominator)
    q = [int(c * den) for c in p]
    g = 0
    for c in q:
        g = math.gcd(g, c)
    q = [c // g for c in q]
    if q[-1] < 0:
        q = [-c for c in q]
    return q


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def pscale(a, c):
    return [c * x for x in a]


def derivative(p):
    return [i * p[i] for i in range(1, len(p))]


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p, x: Fraction) -> int:
    """Sign of an integer polynomial at a rational point, in integer arithmetic."""
    x = Fraction(x)
    a, b = x.numerator, x.denominator
    d = len(p) - 1
    # homogenised Horner: sum c_i a^i b^(d-i) has the sign of p(x) since b > 0
    acc = p[d]
    bp = 1
    for i in range(d - 1, -1, -1):
        bp *= b
        acc = acc * a + p[i] * bp
    return (acc > 0) - (acc < 0)


def _prem(a, b):
    """Pseudo-remainder of a by b, scaled by a positive factor only."""
    a = list(a)
    db = len(b) - 1
    lc = b[-1]
    mult = abs(lc)
    sgn = 1 if lc > 0 else -1
    while len(a) - 1 >= db and a:
        da = len(a) - 1
        coef = a[-1]
        # a <- |lc| a - sgn * coef x^(da-db) b
        a = [mult * c for c in a]
        shift = da - db
        for i, c in enumerate(b):
            a[i + shift] -= sgn * coef * c
        a = trim(a)
    return a


def _content_reduce(p):
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return [c // g for c in p] if g > 1 else p


def sturm_chain(p):
    chain = [p, _content_reduce(derivative(p))]
    while len(chain[-1]) > 1:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_content_reduce([-c for c in r]))
    return chain


def _variations(chain, x):
    signs = [s for s in (sign_at(q, x) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_inf(chain, positive):
    signs = []
    for q in chain:
        s = (q[-1] > 0) - (q[-1] < 0)
        if not positive and (len(q) - 1) % 2:
            s = -s
        signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(p) -> int:
    lc = abs(p[-1])
    return 1 + max((abs(c) + lc - 1) // lc for c in p[:-1]) if len(p) > 1 else 1


def deflate(p, r: Fraction):
    """Primitive quotient of p by (x - r) for a rational root r."""
    d = len(p) - 1
    q = [Fraction(0)] * d
    acc = Fraction(0)
    for i in range(d, 0, -1):
        acc = acc * r + p[i]
        q[i - 1] = acc
    if acc * r + p[0] != 0:
        raise ValueError(f"{r} is not a root")
    return primitive(q)


def isolate_real_roots(p):
    """Isolate the distinct real roots of p.

    Returns (intervals, exact_roots, reduced): ``exact_roots`` are rational
    roots that landed on a bisection point and were divided out, ``reduced``
    is the polynomial left after those divisions and ``intervals`` are
    half-open (lo, hi] boxes each holding exactly one root of ``reduced``.
    """
    p = primitive(p)
    exact = []
    while True:
        if len(p) <= 1:
            return [], exact, p
        if p[0] == 0:
            exact.append(Fraction(0))
            p = p[1:]
            continue
        hit = None
        chain = sturm_chain(p)
        if _variations_inf(chain, False) == _variations_inf(chain, True):
            return [], exact, p
        B = Fraction(cauchy_bound(p))
        out = []
        stack = [(-B, B)]
        while stack:
            lo, hi = stack.pop()
            k = _variations(chain, lo) - _variations(chain, hi)
            if k == 0:
                continue
            if k == 1:
                out.append((lo, hi))
                continue
            mid = (lo + hi) / 2
            if sign_at(p, mid) == 0:
                hit = mid
                break
            stack.append((lo, mid))
            stack.append((mid, hi))
        if hit is None:
            out.sort()
            return out, exact, p
        exact.append(hit)
        p = deflate(p, hit)


def refine(p, lo: Fraction, hi: Fraction, width: Fraction, chain=None):
    """Shrink an isolating interval (lo, hi] of p below ``width``.

    Returns (lo, hi) or a single Fraction if a bisection point hits the root.
    """
    chain = chain or sturm_chain(p)
    while hi - lo >= width:
        mid = (lo + hi) / 2
        if sign_at(p, mid) == 0:
            return mid
        if _variations(chain, lo) - _variations(chain, mid) == 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def rational_roots(p):
    """All distinct rational roots, by exact real-root isolation.

    A rational root c/q of a primitive polynomial has q | lead, so it is
    k/lead for an integer k; once an isolating interval is narrower than
    1/lead it holds at most one such candidate, which is tested exactly.
    """
    intervals, exact, work = isolate_real_roots(p)
    roots = set(exact)
    if len(work) <= 1:
        return sorted(roots)
    lead = work[-1]
    chain = sturm_chain(work)
    width = Fraction(1, lead)
    for lo, hi in intervals:
        got = refine(work, lo, hi, width, chain)
        if isinstance(got, Fraction):
            roots.add(got)
            continue
        lo, hi = got
        for k in range(math.ceil(lo * lead), math.floor(hi * lead) + 1):
            c = Fraction(k, lead)
            if lo < c <= hi and sign_at(work, c) == 0:
                roots.add(c)
    return sorted(roots)


def rational_roots_by_divisors(p, effort_bound=10 ** 7):
    """Rational roots by the textbook candidate list +-d/e, d | c0, e | lead.

    Slow on large constant terms; kept as an independent check.
    """
    p = primitive(p)
    roots = set()
    while p and p[0] == 0:
        roots.add(Fraction(0))
        p = p[1:]
    if len(p) <= 1:
        return sorted(roots)
    num_divs = divisors(factor(p[0], effort_bound))
    den_divs = divisors(factor(p[-1], effort_bound))
    for d in num_divs:
        for e in den_divs:
            for c in (Fraction(d, e), Fraction(-d, e)):
                if sign_at(p, c) == 0:
                    roots.add(c)
    return sorted(roots)


def bisect_sign_change(p, lo: Fraction, hi: Fraction, width: Fraction):
    """Bracket a root of p in (lo, hi) with sign(p(lo)) != sign(p(hi))."""
    slo = sign_at(p, lo)
    shi = sign_at(p, hi)
    if slo == 0:
        return lo, lo
    if shi == 0:
        return hi, hi
    if slo == shi:
        raise ValueError("no sign change on the bracket")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = sign_at(p, mid)
        if s == 0:
            return mid, mid
        if s == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi
