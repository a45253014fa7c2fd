"""Hot integer/float loops, JIT-compiled with numba when available.

Every kernel exists twice: ``_nb_<name>`` (numba ``@njit``) and
``_np_<name>`` (plain numpy). The public name points at one of them.
Set ``MWFAMILY_NO_JIT=1`` to force the numpy path; the numba path is also
skipped silently when numba cannot be imported.

Kernels only ever see machine-sized integers. Callers are responsible for
keeping moduli below ~3e9 so that products fit in int64.
"""
import os

import numpy as np

_FLAG = os.environ.get("MWFAMILY_NO_JIT", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError("numba disabled by MWFAMILY_NO_JIT")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# -- prime sieve -----------------------------------------------------------

def _np_sieve(limit):
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[:2] = False
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = False
    return flags


def _py_sieve(limit):
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[0] = False
    if limit >= 1:
        flags[1] = False
    i = 2
    while i * i <= limit:
        if flags[i]:
            for j in range(i * i, limit + 1, i):
                flags[j] = False
        i += 1
    return flags


# -- roots of an integer polynomial modulo q --------------------------------

def _np_count_roots_mod(coeffs, q):
    # coeffs: int64 array, highest degree first, already reduced mod q
    r = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c in coeffs:
        acc = (acc * r + c) % q
    return int(np.count_nonzero(acc == 0))


def _py_count_roots_mod(coeffs, q):
    count = 0
    for r in range(q):
        acc = 0
        for c in coeffs:
            acc = (acc * r + c) % q
        if acc == 0:
            count += 1
    return count


# -- trial division ---------------------------------------------------------

def _np_trial_divide(n, primes):
    # n: positive int < 2**63; returns (exponents array, cofactor)
    exps = np.zeros(primes.shape[0], dtype=np.int64)
    hits = np.nonzero(n % primes == 0)[0]
    for i in hits:
        p = int(primes[i])
        while n % p == 0:
            n //= p
            exps[i] += 1
    return exps, n


def _py_trial_divide(n, primes):
    exps = np.zeros(primes.shape[0], dtype=np.int64)
    for i in range(primes.shape[0]):
        p = primes[i]
        if p * p > n:
            # remaining n is 1 or a prime; locate it if it is in the table
            if n > 1 and n <= primes[primes.shape[0] - 1]:
                lo = i
                hi = primes.shape[0] - 1
                while lo < hi:
                    mid = (lo + hi) // 2
                    if primes[mid] < n:
                        lo = mid + 1
                    else:
                        hi = mid
                if primes[lo] == n:
                    exps[lo] += 1
                    n = 1
            break
        while n % p == 0:
            n //= p
            exps[i] += 1
    return exps, n


# -- z(t, w) on a grid for the shifted E_{1,n} model -------------------------
# z = 1 - 24t^2 + 56t^3 - 24t^4 + w(-6t^2 + 16t^3 - 4t^4)
#     + w^2(-2/3 t^2 + 8/3 t^3 + t^4) + w^3(8/27 t^3 - 2/9 t^4) - w^4 t^4 / 27
# with t = l/x in (0, 1] and w = 1/l^2 in (0, 1/81].

def _np_shifted_z(t, w):
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    return (1.0 - 24.0 * t2 + 56.0 * t3 - 24.0 * t4
            + w * (-6.0 * t2 + 16.0 * t3 - 4.0 * t4)
            + w * w * (-2.0 / 3.0 * t2 + 8.0 / 3.0 * t3 + t4)
            + w ** 3 * (8.0 / 27.0 * t3 - 2.0 / 9.0 * t4)
            - w ** 4 * t4 / 27.0)


def _np_z_grid_extrema(ts, ws):
    z = _np_shifted_z(ts[:, None], ws[None, :])
    imin = np.unravel_index(np.argmin(z), z.shape)
    imax = np.unravel_index(np.argmax(z), z.shape)
    return (float(z[imin]), int(imin[0]), int(imin[1]),
            float(z[imax]), int(imax[0]), int(imax[1]))


def _py_z_grid_extrema(ts, ws):
    zmin = np.inf
    zmax = -np.inf
    a0 = b0 = a1 = b1 = 0
    for i in range(ts.shape[0]):
        t = ts[i]
        t2 = t * t
        t3 = t2 * t
        t4 = t3 * t
        for j in range(ws.shape[0]):
            w = ws[j]
            z = (1.0 - 24.0 * t2 + 56.0 * t3 - 24.0 * t4
                 + w * (-6.0 * t2 + 16.0 * t3 - 4.0 * t4)
                 + w * w * (-2.0 / 3.0 * t2 + 8.0 / 3.0 * t3 + t4)
                 + w * w * w * (8.0 / 27.0 * t3 - 2.0 / 9.0 * t4)
                 - w * w * w * w * t4 / 27.0)
            if z < zmin:
                zmin = z
                a0 = i
                b0 = j
            if z > zmax:
                zmax = z
                a1 = i
                b1 = j
    return zmin, a0, b0, zmax, a1, b1


if HAVE_NUMBA:
    _nb_sieve = njit(cache=True)(_py_sieve)
    _nb_count_roots_mod = njit(cache=True)(_py_count_roots_mod)
    _nb_trial_divide = njit(cache=True)(_py_trial_divide)
    _nb_z_grid_extrema = njit(cache=True)(_py_z_grid_extrema)

    sieve = _nb_sieve

    def count_roots_mod(coeffs, q):
        return int(_nb_count_roots_mod(np.asarray(coeffs, dtype=np.int64), q))

    trial_divide = _nb_trial_divide
    z_grid_extrema = _nb_z_grid_extrema
else:
    sieve = _np_sieve

    def count_roots_mod(coeffs, q):
        return _np_count_roots_mod(np.asarray(coeffs, dtype=np.int64), q)

    trial_divide = _np_trial_divide
    z_grid_extrema = _np_z_grid_extrema
