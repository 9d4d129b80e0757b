"""Command-line entry point: ``heckesigns <command> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or config error.
"""

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bfree, forms, intervals, voronoi
from .errors import (HeckeError, InvalidLevelError, InvariantViolation, LoadError,
                     UnsupportedWeightError, UsageError)

log = logging.getLogger("heckesigns")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    form: str
    bound: int | None = None
    fmt: str = "csv"
    knobs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound is not None and self.bound < 10:
            raise UsageError("bound must be >= 10")


def parse_range(text):
    """'lo:hi:count' (log-spaced) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"malformed range {text!r}; expected lo:hi:count or a number") from None
    if count < 1 or lo <= 0 or hi < lo:
        raise UsageError(f"malformed range {text!r}")
    if count == 1:
        return [lo]
    return [float(v) for v in np.geomspace(lo, hi, count)]


def parse_form_spec(spec):
    kind, _, rest = spec.partition(":")
    if kind == "level1":
        try:
            return ("level1", int(rest))
        except ValueError:
            raise UsageError(f"bad weight in {spec!r}") from None
    if kind == "curve":
        try:
            vals = [int(v) for v in rest.split(",")]
        except ValueError:
            raise UsageError(f"bad curve spec {spec!r}") from None
        if len(vals) != 6:
            raise UsageError("curve spec needs a1,a2,a3,a4,a6,N")
        return ("curve", tuple(vals[:5]), vals[5])
    if kind == "file":
        if not rest:
            raise UsageError("file spec needs a path")
        return ("file", rest)
    raise UsageError(f"unknown form spec {spec!r}; use level1:k, curve:a1,a2,a3,a4,a6,N or file:path")


def load_form(spec, bound):
    if not spec:
        raise UsageError("--form is required")
    parsed = parse_form_spec(spec)
    try:
        if parsed[0] == "level1":
            return forms.from_level1(parsed[1], bound)
        if parsed[0] == "curve":
            return forms.from_elliptic_curve(parsed[1], parsed[2], bound)
        f = forms.from_file(parsed[1])
    except (UnsupportedWeightError, InvalidLevelError, LoadError) as exc:
        raise UsageError(f"{spec}: {exc}") from exc
    except OSError as exc:
        raise UsageError(f"{spec}: {exc}") from exc
    if f.bound < bound:
        raise UsageError(f"{spec}: file holds {f.bound} coefficients, {bound} needed")
    return f


def read_config(path):
    """key=value lines; '#' starts a comment. Keys use flag names without dashes."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _out(args):
    return open(args.out, "w", newline="") if args.out else sys.stdout


def _g(v):
    return f"{v:.12g}" if isinstance(v, float) else v


def cmd_coeffs(args):
    f = load_form(args.form, args.bound or 1000)
    fh = _out(args)
    try:
        forms.write_coefficients(f, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _default_grid(bound):
    grid = [10**j for j in range(1, 20) if 10**j <= bound]
    if not grid or grid[-1] != bound:
        grid.append(bound)
    return grid


def cmd_signs(args):
    bound = args.bound or 10**4
    f = load_form(args.form, bound)
    xs = [math.floor(x) for x in parse_range(args.x)] if args.x else _default_grid(bound)
    limit = max(xs)
    if limit > f.bound:
        raise UsageError(f"x={limit} exceeds bound {f.bound}")
    bset = bfree.build_bset(f, args.P)
    sieve = bfree.sieve_bfree(bset, limit)
    part = bfree.partition_signs(f, sieve)
    pneg = forms.least_negative_prime(f)
    dens = bfree.density_product(bset)
    rows = []
    for x in xs:
        plus, minus = bfree.direct_sign_count(f, x)
        lb_plus, lb_minus = bfree.lower_bound_count(f, part, x, pneg)
        rows.append({
            "x": x, "plus": plus, "minus": minus,
            "plus_density": plus / x, "minus_density": minus / x,
            "lower_plus": lb_plus, "lower_minus": lb_minus,
            "bfree_scaled": sieve.count(x // pneg),
            "bfree_ratio": sieve.count(x) / x, "density_product": dens,
        })
    fh = _out(args)
    try:
        if args.format == "json":
            json.dump({"form": repr(f), "p_prime": pneg, "rows": [{k: _num(v) for k, v in r.items()}
                                                                   for r in rows]}, fh, indent=2)
            fh.write("\n")
        else:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _g(v) for k, v in r.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()
    ok = all(r["lower_plus"] >= r["bfree_scaled"] and r["lower_minus"] >= r["bfree_scaled"]
             for r in rows)
    return EXIT_OK if ok else EXIT_FAILED


def _num(v):
    return float(f"{v:.12g}") if isinstance(v, float) else v


def cmd_bfree(args):
    bound = args.bound or 10**4
    f = load_form(args.form, bound)
    bset = bfree.build_bset(f, args.P)
    sieve = bfree.sieve_bfree(bset, bound)
    fh = _out(args)
    try:
        if args.format == "json":
            json.dump({"form": repr(f), "limit": bound, "P": bset.prime_bound,
                       "elements_le_limit": [b for b in bset if b <= bound][:64],
                       "count": sieve.count(), "ratio": _num(sieve.count() / bound),
                       "density_product": _num(bfree.density_product(bset))}, fh, indent=2)
            fh.write("\n")
        else:
            bfree.write_csv(f, sieve, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_voronoi(args):
    xs = parse_range(args.x)
    if len(xs) > 1 or not float(xs[0]).is_integer():
        xs = [math.floor(x) + 0.5 for x in xs]
    need = max(max(math.floor(x) for x in xs), max(voronoi.truncation(x, args.M) for x in xs))
    f = load_form(args.form, max(args.bound or 0, need))
    evals = voronoi.residual_scan(f, xs, args.M, precision=args.precision)
    fh = _out(args)
    try:
        if args.format == "json":
            voronoi.write_json(evals, fh)
        else:
            voronoi.write_csv(evals, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_intervals(args):
    xs = parse_range(args.x)
    if not args.form:
        raise UsageError("--form is required")
    parsed = parse_form_spec(args.form)
    level = parsed[2] if parsed[0] == "curve" else 1
    if parsed[0] == "file":
        need = args.bound or 0
    else:
        cn = intervals.c_N(level, args.C, args.psi_exponent)
        top = max(xs)
        y = top + cn * math.sqrt(top)
        need = math.floor(y + cn * math.sqrt(y)) + 1
    f = load_form(args.form, max(args.bound or 0, need))
    reports = [intervals.verify_short_interval(f, x, args.eps, args.C, args.psi_exponent,
                                               x_floor=args.x_floor) for x in xs]
    fh = _out(args)
    try:
        intervals.write_json(reports, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_verify(args):
    from .acceptance import run_all

    results = run_all(only=args.only)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    formp = argparse.ArgumentParser(add_help=False)
    formp.add_argument("--form",
                       help="level1:k | curve:a1,a2,a3,a4,a6,N | file:path")
    formp.add_argument("--bound", type=int, help="coefficient table length")

    parser = argparse.ArgumentParser(prog="heckesigns", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("coeffs", parents=[common, formp], help="write a coefficient file")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("signs", parents=[common, formp], help="sign counts and B-free lower bounds")
    p.add_argument("--x", help="grid lo:hi:count (default: powers of ten up to bound)")
    p.add_argument("--P", type=int, help="prime bound for the exclusion set (default sqrt(x))")
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("bfree", parents=[common, formp], help="B-free membership table")
    p.add_argument("--P", type=int)
    p.set_defaults(func=cmd_bfree)

    p = sub.add_parser("voronoi", parents=[common, formp], help="Voronoi residual scan")
    p.add_argument("--x", required=True, help="lo:hi:count or a single value")
    p.add_argument("--M", default="x", help="truncation policy: x, x/<c>, x^<A> (A <= 2)")
    p.add_argument("--precision", choices=("double", "extended"), default="double")
    p.set_defaults(func=cmd_voronoi)

    p = sub.add_parser("intervals", parents=[common, formp], help="short-interval sign counts")
    p.add_argument("--x", required=True)
    p.add_argument("--C", type=float, default=intervals.DEFAULT_C)
    p.add_argument("--eps", type=float, default=intervals.DEFAULT_EPS)
    p.add_argument("--psi-exponent", type=float, default=intervals.DEFAULT_PSI_EXPONENT)
    p.add_argument("--x-floor", type=float, help="flag (not fail) windows below this x")
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            parser.subcommands[args.command].set_defaults(**read_config(args.config))
            args = parser.parse_args(argv)
            _coerce(args)
        if getattr(args, "bound", None) is not None:
            RunConfig(getattr(args, "form", ""), args.bound, args.format)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"heckesigns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"heckesigns: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (HeckeError, OSError) as exc:
        print(f"heckesigns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # argparse reports bad flags or config values this way
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


_TYPES = {"bound": int, "P": int, "C": float, "eps": float, "psi_exponent": float, "x_floor": float}


def _coerce(args):
    # defaults injected from a config file arrive as strings
    for key, typ in _TYPES.items():
        val = getattr(args, key, None)
        if isinstance(val, str):
            try:
                setattr(args, key, typ(val))
            except ValueError:
                raise UsageError(f"config value for {key!r} is not a {typ.__name__}") from None


if __name__ == "__main__":
    sys.exit(main())
