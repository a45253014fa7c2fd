"""Shared sampling helpers for the test suite."""
import itertools
import random

from mwfamily.curve_core import O, _add, make_curve, named_points, scalar_mul


def lattice_points(C, bound=2, rng=None, count=None):
    """Points a*P0 + b*P+1 (+ c*P2) with small coefficients, O excluded."""
    pts = named_points(C)
    gens = [pts["P0"], pts["Pplus1"]] + ([pts["P2"]] if "P2" in pts else [])
    combos = [c for c in itertools.product(range(-bound, bound + 1), repeat=len(gens)) if any(c)]
    if rng is not None and count is not None:
        combos = rng.sample(combos, min(count, len(combos)))
    out = []
    for coeffs in combos:
        acc = O
        for k, G in zip(coeffs, gens):
            acc = _add(C, acc, scalar_mul(C, G, k))
        if not acc.is_infinity:
            out.append(acc)
    return out


def sample_curves(k, seed=0, limit=60):
    rng = random.Random(seed)
    out = []
    while len(out) < k:
        if rng.random() < 0.5:
            C = make_curve(1, rng.randint(2, limit))
        else:
            C = make_curve(rng.randint(2, limit), 1)
        if C not in out:
            out.append(C)
    return out
