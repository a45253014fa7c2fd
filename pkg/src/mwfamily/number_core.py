"""Integer arithmetic: valuations, factorization, primes, prime-zeta sums.

Rationals throughout the package are :class:`fractions.Fraction`, which is
immutable and kept in lowest terms on construction.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf

from . import _kernels
from .errors import DomainError, IncompleteFactorizationError, UndefinedValuationError

TRIAL_LIMIT = 10 ** 6
DEFAULT_EFFORT = 10 ** 8

# sum over primes of 1/p^2, truncated reference value and a safe upper bound
PRIME_ZETA_2 = Fraction("0.4522474200410654985")
PRIME_ZETA_2_UPPER = Fraction("0.4522474200410654986")

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = _kernels.sieve(int(limit))
    return np.nonzero(flags)[0].astype(np.int64)


def _mr_round(n, d, s, a):
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int, rounds: int = 64) -> bool:
    """Miller-Rabin. Deterministic below 3.3e24, otherwise ``rounds`` random bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 3317044064679887385961981:
        return all(_mr_round(n, d, s, a) for a in _SMALL_PRIMES)
    rng = random.Random(n)
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(rounds))


def valuation(a: int, p: int) -> int:
    """Largest e with p**e dividing a."""
    if a == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    if p < 2 or not is_prime(p):
        raise DomainError(f"{p} is not prime")
    a = abs(a)
    e = 0
    while a % p == 0:
        a //= p
        e += 1
    return e


def rational_valuation(q: Fraction, p: int) -> int:
    q = Fraction(q)
    return valuation(q.numerator, p) - valuation(q.denominator, p)


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p ** e
        return v

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self):
        if not self.factors:
            return str(self.sign)
        body = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)
        return ("-" if self.sign < 0 else "") + body


class _Budget:
    def __init__(self, limit):
        self.left = limit

    def spend(self, k=1):
        self.left -= k
        return self.left >= 0


def _brent(n, budget, seed):
    """One Pollard-Brent run; returns a nontrivial factor or None."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            if not budget.spend(2 * min(m, r - k)):
                return None
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if not budget.spend():
                return None
    return g if g != n else None


def _split(n, budget, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, budget, out)
        _split(r, budget, out)
        return
    seed = 0
    while True:
        if budget.left <= 0:
            raise IncompleteFactorizationError(
                f"effort bound exhausted on cofactor {n}", partial=dict(out), cofactor=n)
        d = _brent(n, budget, seed)
        seed += 1
        if d:
            _split(d, budget, out)
            _split(n // d, budget, out)
            return


@lru_cache(maxsize=4096)
def factor(N: int, effort_bound: int = DEFAULT_EFFORT) -> Factorization:
    """Complete factorization of a nonzero integer.

    Trial division up to 1e6, then Pollard-Brent. ``effort_bound`` caps the
    number of modular multiplications spent in the rho stage.
    """
    if N == 0:
        raise DomainError("cannot factor 0")
    sign = -1 if N < 0 else 1
    n = abs(N)
    out: dict[int, int] = {}
    limit = min(TRIAL_LIMIT, math.isqrt(n) + 1)
    if n < 2 ** 62:
        table = primes_up_to(TRIAL_LIMIT)
        primes = table[:int(np.searchsorted(table, limit, side="right"))]
        exps, n = _kernels.trial_divide(n, primes)
        n = int(n)
        for i in np.nonzero(exps)[0]:
            out[int(primes[i])] = int(exps[i])
    else:
        for p in primes_up_to(TRIAL_LIMIT).tolist():
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
    if n > 1:
        if n < TRIAL_LIMIT ** 2:
            out[n] = out.get(n, 0) + 1
        else:
            _split(n, _Budget(effort_bound), out)
    return Factorization(sign, tuple(sorted(out.items())))


def divisors(f: Factorization) -> list[int]:
    """Positive divisors from a factorization."""
    divs = [1]
    for p, e in f.factors:
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def nth_prime(k: int) -> int:
    """The k-th prime, 1-indexed."""
    if k < 1:
        raise DomainError("k must be >= 1")
    # Rosser: p_k < k (ln k + ln ln k) for k >= 6
    bound = 15 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 3
    return int(primes_up_to(bound)[k - 1])


def first_primes(K: int) -> list[int]:
    if K < 1:
        return []
    return [int(p) for p in primes_up_to(max(15, nth_prime(K)))[:K]]


def prime_zeta_partial_exact(K: int) -> Fraction:
    """sum_{k<=K} 1/p_k^2 as an exact rational."""
    return sum((Fraction(1, p * p) for p in first_primes(K)), Fraction(0))


def prime_zeta_partial(K: int, prec: int = 128) -> mpf:
    """sum_{k<=K} 1/p_k^2 rounded once to ``prec`` bits (relative error <= 2^-prec)."""
    if K < 1:
        raise DomainError("K must be >= 1")
    s = prime_zeta_partial_exact(K)
    with mp.workprec(prec):
        return mpf(s.numerator) / s.denominator
