"""Density of parameters satisfying the square-free condition.

For each family the discriminant is -16 D(t) with D a polynomial in the
free parameter t.  The proportion of t for which D(t) has no square factor
p^2 with p > 3 is bounded below by a finite Euler product over p_3..p_K
times a tail factor controlled by the prime zeta value sum_p 1/p^2.
"""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .curve_core import make_curve
from .errors import DomainError, IndeterminateError
from .local_analysis import squarefree_condition_holds
from .number_core import DEFAULT_EFFORT, PRIME_ZETA_2_UPPER, first_primes, is_prime, prime_zeta_partial_exact


class Family(enum.Enum):
    E1N = "e1n"     # m = 1, D(n) = 27 n^4 - 4
    EM1 = "em1"     # n = 1, D(m) = 27 - 4 m^6

    @property
    def poly(self) -> tuple:
        """Coefficients of D, highest degree first."""
        if self is Family.E1N:
            return (27, 0, 0, 0, -4)
        return (-4, 0, 0, 0, 0, 0, 27)

    @property
    def root_bound(self) -> int:
        """Upper bound for the number of roots of D modulo p^2, p > 3."""
        return 4 if self is Family.E1N else 6

    def curve(self, t: int):
        return make_curve(1, t) if self is Family.E1N else make_curve(t, 1)


def _check_prime(p):
    if p <= 3 or not is_prime(p):
        raise DomainError(f"p must be a prime > 3, got {p}")


def omega_count(F: Family, p: int) -> int:
    """#{t mod p^2 : D(t) = 0 mod p^2}, by enumerating all residues."""
    _check_prime(p)
    q = p * p
    return _kernels.count_roots_mod([c % q for c in F.poly], q)


def omega_count_hensel(F: Family, p: int) -> int:
    """The same count by lifting roots modulo p one at a time."""
    _check_prime(p)
    coeffs = F.poly
    d = len(coeffs) - 1
    deriv = [c * (d - i) for i, c in enumerate(coeffs[:-1])]

    def ev(cs, x, mod):
        acc = 0
        for c in cs:
            acc = (acc * x + c) % mod
        return acc

    total = 0
    for r in range(p):
        if ev(coeffs, r, p):
            continue
        if ev(deriv, r, p):
            total += 1                       # simple root: unique lift
        elif ev(coeffs, r, p * p) == 0:
            total += p                       # every lift is a root
    return total


@dataclass(frozen=True)
class KappaBound:
    finite_product: Fraction
    tail_factor: Fraction       # lower bound for the tail factor
    bound: Fraction             # finite_product * tail_factor, a certified lower bound
    K: int


def kappa_lower_bound(F: Family, K: int) -> KappaBound:
    """Euler-product lower bound over p_3..p_K with a prime-zeta tail.

    Everything is exact rational arithmetic; the only approximation is the
    prime zeta value, for which a certified upper bound is used, so the
    returned bound is a lower bound for the density.
    """
    if K < 3:
        raise DomainError("K must be >= 3")
    prod = Fraction(1)
    for p in first_primes(K)[2:]:
        prod *= 1 - Fraction(omega_count(F, p), p * p)
    tail_sum = PRIME_ZETA_2_UPPER - prime_zeta_partial_exact(K)
    tail = 1 - F.root_bound * tail_sum
    return KappaBound(prod, tail, prod * tail, K)


def _census_chunk(args):
    fam, lo, hi, effort = args
    F = Family(fam)
    count = 0
    for t in range(lo, hi + 1):
        try:
            if squarefree_condition_holds(F.curve(t), effort):
                count += 1
        except IndeterminateError as exc:
            raise IndeterminateError(f"parameter {t}: {exc}") from exc
    return count


def squarefree_census(F: Family, x: int, workers: int = 1,
                      effort_bound: int = DEFAULT_EFFORT) -> int:
    """Number of t in (0, x] whose discriminant passes the square-free condition."""
    if x < 1:
        raise DomainError("x must be >= 1")
    if workers <= 1:
        return _census_chunk((F.value, 1, x, effort_bound))
    step = max(1, -(-x // (4 * workers)))
    jobs = [(F.value, lo, min(x, lo + step - 1), effort_bound) for lo in range(1, x + 1, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_census_chunk, jobs))
