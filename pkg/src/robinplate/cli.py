"""Command-line front end.

Exit codes: 0 success (all checks passed), 1 computational failure or failed
check, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import ball, io, ritz, verify
from .ball import BallParams
from .domains import Domain2D
from .errors import DomainError
from .profile import TrialProfile, profile_table


class UsageError(Exception):
    pass


def _positive(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {s!r}")
        if not (math.isfinite(v) and v > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {s}")
        return v
    return conv


def _finite(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("expected a finite number")
    return v


def _dim(s):
    try:
        d = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension must be an integer, got {s!r}")
    if d < 2:
        raise argparse.ArgumentTypeError("dimension must be >= 2")
    return d


def _count(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def _domain(s):
    try:
        if s.lstrip().startswith("{"):
            return Domain2D.from_spec(json.loads(s))
        return Domain2D.from_file(s)
    except (OSError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"cannot read domain spec {s!r}: {exc}")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _emit_table(args, header, rows):
    fh, close = _open_out(args.output)
    try:
        if args.format == "json":
            for row in rows:
                fh.write(io.dump_json(dict(zip(header, row))) + "\n")
        else:
            io.write_csv(fh, header, rows)
    finally:
        if close:
            fh.close()


def _emit_json(args, obj):
    fh, close = _open_out(args.output)
    try:
        fh.write(io.dump_json(obj) + "\n")
    finally:
        if close:
            fh.close()


def cmd_ball(args):
    p = BallParams(args.dim, args.tau, args.alpha)
    modes = ball.spectrum(p, args.lmax, args.count)
    _emit_table(args, io.MODE_HEADER, io.mode_rows(p, modes))
    return 0


def cmd_sweep(args):
    alphas = np.linspace(args.alpha_from, args.alpha_to, args.points)
    alphas = np.sort(alphas)
    if args.domain is not None:
        rows = ritz.sweep(args.domain, args.tau, alphas, args.degree)
    else:
        rows = []
        for a in alphas:
            p = BallParams(args.dim, args.tau, float(a))
            rows.append((float(a), ball.first_eigenvalue(p).lam, ball.second_eigenvalue(p).lam))
    _emit_table(args, io.SWEEP_HEADER, rows)
    return 0


def _sub_reports():
    return {"small_ta_nice": "small_ta", "small_ta_gamma_lb": "small_ta",
            "small_ta_gamma_star": "small_ta", "small_ta_ranges": "small_ta"}


def cmd_verify(args):
    config = verify.load_config(args.config) if args.config else {}
    subs = _sub_reports()
    suites = None
    if args.suite != ["all"]:
        for s in args.suite:
            if s not in verify.SUITES and s not in subs:
                raise UsageError(f"unknown lemma id {s!r}; known: "
                                 f"{', '.join(verify.suite_names() + sorted(subs))}")
        suites = list(dict.fromkeys(subs.get(s, s) for s in args.suite))
    t0 = time.perf_counter()
    reports = verify.run_all(config, suites)
    if suites is not None:
        reports = [r for r in reports
                   if r.lemma in args.suite or subs.get(r.lemma, r.lemma) in args.suite]
    fh, close = _open_out(args.output)
    try:
        for r in reports:
            fh.write(r.to_json() + "\n")
    finally:
        if close:
            fh.close()
    for r in reports:
        print(f"{r.lemma}: {'pass' if r.passed else 'FAIL'} ({r.elapsed:.2f} s)", file=sys.stderr)
    print(f"total {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def cmd_ritz(args):
    sys_ = ritz.assemble(args.domain, args.tau, args.alpha, args.degree)
    sol = ritz.solve(sys_, args.k)
    rows = [(i + 1, lam, res) for i, (lam, res) in enumerate(zip(sol.eigenvalues, sol.residuals))]
    _emit_table(args, io.SOLUTION_HEADER, rows)
    return 0


def cmd_iso(args):
    res = ritz.isoperimetric_check(args.domain, args.tau, args.alpha, args.degree)
    _emit_json(args, {"domain": args.domain.to_spec(), "tau": args.tau, "alpha": args.alpha,
                      "degree": args.degree, "radius": res.radius,
                      "lambda2_domain": res.lambda2_domain, "lambda2_ball": res.lambda2_ball,
                      "margin": res.margin})
    return 0


def cmd_steklov(args):
    sigma = ritz.steklov_sigma2(args.domain, args.tau, args.degree)
    R = args.domain.equal_area_radius
    _emit_json(args, {"domain": args.domain.to_spec(), "tau": args.tau, "degree": args.degree,
                      "sigma2": sigma, "sigma2_ball": args.tau / R, "radius": R})
    return 0


def cmd_profile(args):
    t = TrialProfile.from_params(BallParams(args.dim, args.tau, args.alpha))
    r = np.linspace(args.rmax / args.points, args.rmax, args.points)
    _emit_table(args, io.PROFILE_HEADER, [tuple(row) for row in profile_table(t, r)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robinplate",
        description="Robin plate spectra on balls and planar domains, and lemma verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        if fmt:
            sp.add_argument("--format", choices=["csv", "json"], default="csv")

    def ball_args(sp, alpha=True):
        sp.add_argument("--dim", type=_dim, default=2, help="dimension d (default 2)")
        sp.add_argument("--tau", type=_positive("tau"), required=True, help="tension > 0")
        if alpha:
            sp.add_argument("--alpha", type=_finite, required=True, help="Robin parameter")

    sp = sub.add_parser("ball", help="lowest modes of the unit ball")
    ball_args(sp)
    sp.add_argument("--lmax", type=_count, default=3, help="largest angular order (default 3)")
    sp.add_argument("--count", type=_count, default=2, help="number of modes (default 2)")
    common(sp)
    sp.set_defaults(func=cmd_ball)

    sp = sub.add_parser("sweep", help="Lambda_1 and Lambda_2 along an alpha range")
    ball_args(sp, alpha=False)
    sp.add_argument("--alpha-from", type=_finite, required=True)
    sp.add_argument("--alpha-to", type=_finite, required=True)
    sp.add_argument("--points", type=_count, default=50)
    sp.add_argument("--domain", type=_domain, default=None,
                    help="planar domain spec (TOML/JSON file or inline JSON); default: unit ball")
    sp.add_argument("--degree", type=int, default=12)
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run lemma verifications (JSON lines)")
    sp.add_argument("--suite", nargs="+", default=["all"],
                    help="'all' or one or more lemma ids")
    sp.add_argument("--config", default=None, help="TOML/JSON file with a [grid] table")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_verify)

    for name, func, helptext in (("ritz", cmd_ritz, "Ritz eigenvalues on a planar domain"),
                                 ("iso", cmd_iso, "compare Lambda_2 with the equal-area disk"),
                                 ("steklov", cmd_steklov, "second biharmonic Steklov eigenvalue")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--domain", type=_domain, required=True,
                        help="domain spec (TOML/JSON file or inline JSON)")
        sp.add_argument("--tau", type=_positive("tau"), required=True)
        if name != "steklov":
            sp.add_argument("--alpha", type=_finite, required=True)
        sp.add_argument("--degree", type=int, default=12)
        if name == "ritz":
            sp.add_argument("--k", type=_count, default=2)
            common(sp)
        else:
            common(sp, fmt=False)
        sp.set_defaults(func=func)

    sp = sub.add_parser("profile", help="trial profile and N[rho] curves")
    ball_args(sp)
    sp.add_argument("--points", type=_count, default=200)
    sp.add_argument("--rmax", type=_positive("rmax"), default=3.0)
    common(sp)
    sp.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", None) is not None and args.command == "sweep" and args.points < 2 \
            and args.alpha_from != args.alpha_to:
        parser.error("--points must be >= 2 for a nontrivial range")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"robinplate {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"robinplate {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
