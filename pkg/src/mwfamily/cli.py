"""Command-line interface: ``mwfamily <command> ...``.

Exit status: 0 when every requested check passes or is not applicable,
1 when any check fails, 2 on a usage or configuration error and 3 when a
check could not be decided without external generator data.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from mpmath import mp

from . import __version__
from .curve_core import Point, make_curve, named_points
from .density import Family, kappa_lower_bound, omega_count, omega_count_hensel, squarefree_census
from .errors import MWFamilyError
from .heights import ArchStrategy, canonical_height, lambda_arch
from .local_analysis import (disc_factorization, is_global_minimal, kodaira_type,
                             real_root_bounds)
from .number_core import DEFAULT_EFFORT
from .saturation import (EXTERNAL, FAIL, PASS, CurveReport, _fmt, check_remark_relations,
                         load_generators, verify_e1n, verify_em1)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXTERNAL = 0, 1, 2, 3

log = logging.getLogger("mwfamily")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    series_terms: int = 40
    factor_effort: int = DEFAULT_EFFORT
    worker_count: int = 1
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.precision_bits < 64:
            raise UsageError("--prec must be at least 64")
        if self.series_terms < 8:
            raise UsageError("--terms must be at least 8")
        if self.worker_count < 1:
            raise UsageError("--workers must be at least 1")
        if self.factor_effort < 1:
            raise UsageError("--effort must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=int, default=128, help="working precision in bits")
    common.add_argument("--terms", type=int, default=40, help="archimedean series depth")
    common.add_argument("--workers", type=int, default=1, help="processes for range drivers")
    common.add_argument("--effort", type=int, default=DEFAULT_EFFORT,
                        help="factorization effort bound")
    common.add_argument("--json", metavar="PATH", help="write line-delimited JSON records")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mwfamily", description="Generators of E_{m,n}: y^2 = x^3 - m^2 x + n^2")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    curve = sub.add_parser("curve", help="curve data")
    curve_sub = curve.add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = curve_sub.add_parser("info", parents=[common])
    info.add_argument("--m", type=int, required=True)
    info.add_argument("--n", type=int, required=True)

    red = sub.add_parser("reduction", parents=[common], help="Kodaira symbols at bad primes")
    red.add_argument("--m", type=int, required=True)
    red.add_argument("--n", type=int, required=True)

    h = sub.add_parser("height", parents=[common], help="canonical height of a point")
    h.add_argument("--m", type=int, required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--x", type=Fraction, required=True)
    h.add_argument("--y", type=Fraction, required=True)
    h.add_argument("--strategy", choices=["auto", "shifted", "modified"], default="auto")
    h.add_argument("--shift", type=Fraction, default=None)

    ver = sub.add_parser("verify", help="basis-extension verification over a range")
    ver_sub = ver.add_subparsers(dest="family", required=True, parser_class=_Parser)
    for fam in ("e1n", "em1"):
        v = ver_sub.add_parser(fam, parents=[common])
        v.add_argument("--from", dest="lo", type=int, required=True)
        v.add_argument("--to", dest="hi", type=int)
        v.add_argument("--generators", metavar="FILE",
                       help="basis of the Mordell-Weil group (single parameter only)")

    sub.add_parser("remark12", parents=[common], help="small-parameter scalar relations")

    den = sub.add_parser("density", help="square-free density computations")
    den_sub = den.add_subparsers(dest="action", required=True, parser_class=_Parser)
    k = den_sub.add_parser("kappa", parents=[common])
    k.add_argument("--family", choices=["e1n", "em1"], required=True)
    k.add_argument("--primes", type=int, default=60, help="number of primes K")
    c = den_sub.add_parser("census", parents=[common])
    c.add_argument("--family", choices=["e1n", "em1"], required=True)
    c.add_argument("--x", type=int, required=True)
    o = den_sub.add_parser("omega", parents=[common])
    o.add_argument("--family", choices=["e1n", "em1"], required=True)
    o.add_argument("--prime", type=int, required=True)
    return p


# -- output -------------------------------------------------------------------

class Output:
    def __init__(self, path):
        self.path = path
        self.records = []

    def emit(self, m, n, check, status, **certificate):
        self.records.append({"m": m, "n": n, "check": check, "status": status,
                             "certificate": _fmt(certificate)})

    def extend(self, report: CurveReport):
        self.records.extend(report.records())

    def close(self):
        if not self.path:
            return
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"schema": SCHEMA_VERSION}) + "\n")
            for r in self.records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")

    def exit_code(self) -> int:
        statuses = {r["status"] for r in self.records}
        if FAIL in statuses:
            return EXIT_FAIL
        if EXTERNAL in statuses:
            return EXIT_EXTERNAL
        return EXIT_OK


def _table(rows, headers):
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for r in rows:
        print("  ".join(str(x).ljust(w) for x, w in zip(r, widths)))


# -- commands -------------------------------------------------------------------

def cmd_curve_info(args, cfg, out):
    C = make_curve(args.m, args.n)
    fac = disc_factorization(C, cfg.factor_effort)
    rb = real_root_bounds(C)
    info = {
        "a4": C.a4, "a6": C.a6, "b2": C.b2, "b4": C.b4, "b6": C.b6, "b8": C.b8,
        "c4": C.c4, "c6": C.c6, "disc": C.disc, "disc_factored": str(fac),
        "global_minimal": is_global_minimal(C, cfg.factor_effort),
        "real_roots": [[str(lo), str(hi)] for lo, hi in rb.roots],
        "root_bounds": {k: [str(a), str(b)] for k, (a, b) in rb.bounds.items()},
        "named_points": {k: repr(P) for k, P in named_points(C).items()},
    }
    for k, v in info.items():
        print(f"{k:15} {v}")
    out.emit(C.m, C.n, "curve-info", PASS, **info)


def cmd_reduction(args, cfg, out):
    C = make_curve(args.m, args.n)
    fac = disc_factorization(C, cfg.factor_effort)
    rows = []
    for p, e in fac.factors:
        t = kodaira_type(C, p)
        rows.append((p, e, str(t)))
        out.emit(C.m, C.n, f"kodaira@{p}", PASS, ord_disc=e, type=str(t))
    print(f"{C.label}: disc = {fac}")
    _table(rows, ("p", "ord_p(disc)", "type"))


def cmd_height(args, cfg, out):
    C = make_curve(args.m, args.n)
    P = Point(args.x, args.y)
    strategy = None
    if args.strategy != "auto":
        strategy = ArchStrategy(args.strategy, args.shift or 0)
    h = canonical_height(C, P, cfg.precision_bits, cfg.series_terms, strategy)
    digits = max(15, cfg.precision_bits * 3 // 10)
    print(f"h({P}) on {C.label} = {mp.nstr(h.value, digits)} +/- {mp.nstr(h.radius, 3)}")
    if h.exact_part:
        print("finite part: " + " + ".join(f"({c}) log {b}" for b, c in h.exact_part))
    cert = {"value": h.value, "radius": h.radius,
            "exact_part": [[b, str(c)] for b, c in h.exact_part]}
    if not P.is_infinity and P.y != 0:
        a = lambda_arch(C, P, strategy, cfg.series_terms, cfg.precision_bits)
        cert["strategy"] = str(a.strategy)
        print(f"archimedean strategy: {a.strategy}")
    out.emit(C.m, C.n, "height", PASS, **cert)


def _verify_job(job):
    fam, t, gens, prec, terms = job
    if fam == "e1n":
        return verify_e1n(t, gens, prec, terms)
    return verify_em1(t, gens, prec, terms)


def cmd_verify(args, cfg, out):
    lo = args.lo
    hi = args.hi if args.hi is not None else lo
    if hi < lo:
        raise UsageError("--to must be >= --from")
    gens = None
    if args.generators:
        if hi != lo:
            raise UsageError("--generators applies to a single parameter")
        gens = load_generators(args.generators)
    jobs = [(args.family, t, gens, cfg.precision_bits, cfg.series_terms) for t in range(lo, hi + 1)]
    if cfg.worker_count > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.worker_count) as pool:
            reports = list(pool.map(_verify_job, jobs))
    else:
        reports = [_verify_job(j) for j in jobs]
    rows = []
    for r in reports:
        out.extend(r)
        last = r.checks[-1]
        rows.append((r.m, r.n, r.overall, last.name))
    _table(rows, ("m", "n", "overall", "deciding check"))


def cmd_remark12(args, cfg, out):
    rep = check_remark_relations()
    out.extend(rep)
    _table([(c.name, c.status) for c in rep.checks], ("relation", "status"))


def cmd_density(args, cfg, out):
    F = Family(args.family)
    if args.action == "kappa":
        k = kappa_lower_bound(F, args.primes)
        status = PASS if k.bound > Fraction(97, 100) else FAIL
        print(f"finite product  {float(k.finite_product):.12f}")
        print(f"tail factor    >{float(k.tail_factor):.12f}")
        print(f"lower bound    >{float(k.bound):.12f}  ({'>' if status == PASS else '<='} 0.97)")
        out.emit(None, None, f"kappa-{F.value}", status,
                 K=k.K, finite_product=k.finite_product, tail_factor=k.tail_factor,
                 bound=k.bound, finite_product_float=float(k.finite_product),
                 tail_factor_float=float(k.tail_factor))
    elif args.action == "census":
        c = squarefree_census(F, args.x, cfg.worker_count, cfg.factor_effort)
        print(f"{c} of {args.x} parameters pass the square-free condition ({c / args.x:.4f})")
        out.emit(None, None, f"census-{F.value}", PASS, x=args.x, count=c)
    else:
        w = omega_count(F, args.prime)
        w2 = omega_count_hensel(F, args.prime)
        status = PASS if w == w2 and w <= F.root_bound else FAIL
        print(f"omega({args.prime}) = {w}")
        out.emit(None, None, f"omega-{F.value}", status, p=args.prime, count=w, hensel=w2)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(args.prec, args.terms, args.effort, args.workers, args.json)
    except UsageError as exc:
        print(f"mwfamily: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:              # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Output(cfg.output_path)
    handlers = {"curve": cmd_curve_info, "reduction": cmd_reduction, "height": cmd_height,
                "verify": cmd_verify, "remark12": cmd_remark12, "density": cmd_density}
    try:
        handlers[args.command](args, cfg, out)
    except UsageError as exc:
        print(f"mwfamily: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MWFamilyError as exc:
        print(f"mwfamily: {type(exc).__name__}: {exc}", file=sys.stderr)
        out.emit(getattr(args, "m", None), getattr(args, "n", None), args.command, FAIL,
                 error=f"{type(exc).__name__}: {exc}")
        out.close()
        return EXIT_FAIL
    out.close()
    return out.exit_code()


def main():
    sys.exit(run())
