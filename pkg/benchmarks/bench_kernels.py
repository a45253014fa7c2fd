"""Compare the numba kernels with their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  The numba timings
exclude the first (compiling) call.
"""
import timeit

import numpy as np

from mwfamily import _kernels as K
from mwfamily.number_core import primes_up_to


def bench(label, fn_nb, fn_np, repeat=5):
    if fn_nb is not None:
        fn_nb()  # compile
        t_nb = min(timeit.repeat(fn_nb, number=1, repeat=repeat))
    else:
        t_nb = float("nan")
    t_np = min(timeit.repeat(fn_np, number=1, repeat=repeat))
    print(f"{label:28} numba {t_nb * 1e3:9.2f} ms   numpy {t_np * 1e3:9.2f} ms")


def main():
    print(f"backend in use: {K.BACKEND}")
    nb = K.HAVE_NUMBA
    limit = 10 ** 6
    bench("sieve(1e6)", (lambda: K._nb_sieve(limit)) if nb else None,
          lambda: K._np_sieve(limit))

    coeffs = np.array([27 % 78961, 0, 0, 0, -4 % 78961], dtype=np.int64)
    bench("roots mod 281^2", (lambda: K._nb_count_roots_mod(coeffs, 78961)) if nb else None,
          lambda: K._np_count_roots_mod(coeffs, 78961))

    primes = primes_up_to(10 ** 6)
    n = 999983 * 999979
    bench("trial division (semiprime)", (lambda: K._nb_trial_divide(n, primes)) if nb else None,
          lambda: K._np_trial_divide(n, primes))

    ts = np.linspace(1e-12, 1.0, 2001)
    ws = np.linspace(1e-12, 1 / 81, 201)
    bench("z grid 2001x201", (lambda: K._nb_z_grid_extrema(ts, ws)) if nb else None,
          lambda: K._np_z_grid_extrema(ts, ws))


if __name__ == "__main__":
    main()
