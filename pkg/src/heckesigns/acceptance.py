"""Desk-scale acceptance checks, shared by ``heckesigns verify`` and the test suite.

Each check returns a :class:`CriterionResult`; tolerances are fixed here.
"""

import math
import statistics
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import bfree, forms, intervals, voronoi
from .arith import primes_up_to

DELTA_BOUND = 1_010_000
CURVE = (0, -1, 1, -10, -20)
CURVE_LEVEL = 11
CURVE_BOUND = 1_130_000


def naive_eta24(length):
    """q * prod (1 - q^n)^24 by multiplying in one factor (1 - q^n) at a time."""
    c = np.zeros(length, dtype=object)
    c[0] = 1
    for n in range(1, length):
        for _ in range(24):
            c[n:] = c[n:] - c[:-n]
    return [0] + [int(v) for v in c[: length - 1]]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


class Context:
    """Lazily built forms shared across criteria."""

    @cached_property
    def delta(self):
        return forms.from_level1(12, DELTA_BOUND)

    @cached_property
    def curve(self):
        return forms.from_elliptic_curve(CURVE, CURVE_LEVEL, CURVE_BOUND)


def exact_coefficients(ctx):
    f = ctx.delta
    limit = 10**5
    a = f.coeffs
    pairs = forms.random_coprime_pairs(limit, 10**4, seed=12)
    mult_fail = [(m, n) for m, n in pairs if a[m * n] != a[m] * a[n]]
    rec_fail = []
    checked = 0
    for p in primes_up_to(math.isqrt(limit)):
        p = int(p)
        prev, cur, pk = 1, a[p], p
        while pk * p <= limit:
            nxt = a[pk * p]
            if nxt != a[p] * cur - p**11 * prev:
                rec_fail.append(pk * p)
            prev, cur, pk = cur, nxt, pk * p
            checked += 1
    oracle = naive_eta24(10)
    spots = {n: (a[n], oracle[n]) for n in (2, 3, 4)}
    spot_ok = all(x == y for x, y in spots.values()) and [a[n] for n in (2, 3, 4)] == [-24, 252, -1472]
    ok = not mult_fail and not rec_fail and spot_ok
    return CriterionResult(1, "exact coefficients", ok,
                           f"{len(pairs)} coprime pairs ({len(mult_fail)} bad), {checked} prime-power "
                           f"steps ({len(rec_fail)} bad), a(2..4)={[spots[n][0] for n in (2, 3, 4)]}")


def deligne(ctx):
    bad = {name: forms.verify_deligne(f, 10**6) for name, f in (("level1:12", ctx.delta),
                                                                ("level-11 curve", ctx.curve))}
    ok = all(v is None for v in bad.values())
    return CriterionResult(2, "Deligne bound", ok, f"first counterexample per form: {bad}")


def level_prime(ctx):
    f = ctx.curve
    a11 = f.a(11)
    powers = [f.a(11**v) == a11**v for v in range(1, 6)]
    ok = a11 in (1, -1) and all(powers)
    return CriterionResult(3, "level-prime relation", ok, f"a(11)={a11}, a(11^v)=a(11)^v for v<=5: {powers}")


def bfree_density(ctx):
    f = ctx.delta
    bset = bfree.build_bset(f, 10**3)
    sieve = bfree.sieve_bfree(bset, 10**6)
    ratio = sieve.count() / 10**6
    product = bfree.density_product(bset)
    target = 4 / math.pi**2
    rel = abs(ratio - product) / product
    ok = rel <= 0.01 and abs(product - target) <= 1e-9
    return CriterionResult(4, "B-free density", ok,
                           f"ratio={ratio:.6f}, product={product:.9f}, 4/pi^2={target:.9f}, rel.dev={rel:.2e}")


def linear_lower_bound(ctx):
    f = ctx.delta
    x = 10**6
    pneg = forms.least_negative_prime(f)
    sieve = bfree.sieve_bfree(bfree.build_bset(f), x)
    part = bfree.partition_signs(f, sieve)
    lower = bfree.lower_bound_count(f, part, x, pneg)
    floor_count = sieve.count(x // pneg)
    plus, minus = bfree.direct_sign_count(f, x)
    ok = (pneg == 2 and min(lower) >= floor_count and plus / x >= 0.202 and minus / x >= 0.202
          and plus >= lower[0] and minus >= lower[1])
    return CriterionResult(5, "linear lower bound", ok,
                           f"p'={pneg}, lower=(+{lower[0]}, -{lower[1]}) >= |A cap [1,x/p']|={floor_count}, "
                           f"direct densities=({plus / x:.4f}, {minus / x:.4f})")


def moebius(ctx):
    f = ctx.curve
    worst = max(abs(voronoi.moebius_identity(f, x) - voronoi.partial_sum_coprime(f, x))
                for x in range(1, 10**4 + 1))
    return CriterionResult(6, "Moebius identity", worst <= 1e-6, f"max |difference| over x<=10^4: {worst:.2e}")


def voronoi_formula(ctx):
    f = ctx.delta
    xs = voronoi.half_integer_grid(1e3, 1e5, 100)
    full = voronoi.residual_scan(f, xs, "x")
    short = voronoi.residual_scan(f, xs, "x/100")
    worst = max(abs(e.residual_over_x4) for e in full)
    med_full = statistics.median(abs(e.residual) for e in full)
    med_short = statistics.median(abs(e.residual) for e in short)
    ok = worst <= 0.5 and med_full < med_short
    return CriterionResult(7, "truncated Voronoi formula", ok,
                           f"max |res|/x^(1/4)={worst:.4f} (<=0.5), median |res| M=x: {med_full:.6f} "
                           f"< M=x/100: {med_short:.6f}")


R_BETA_GRID = {
    "beta": sorted({m / d for m in (1, 2, 3, 4, 5, 9) for d in (1, 2, 3)}),
    "alpha": (5, 10, 20, 50),
    "t": (1, 13, 100),
    "tau": (1, -1),
}


def kernel_identities(ctx=None):
    worst = 0.0
    count = 0
    for beta in R_BETA_GRID["beta"]:
        for alpha in R_BETA_GRID["alpha"]:
            for t in R_BETA_GRID["t"]:
                for tau in R_BETA_GRID["tau"]:
                    num, closed = voronoi.r_beta(voronoi.KernelParams(alpha, tau, t, beta))
                    worst = max(worst, abs(num - closed))
                    count += 1
    main_dev = 0.0
    for alpha in (20, 50, 100):
        for t in (1, 13, 100):
            for tau in (1, -1):
                num, closed = voronoi.r_beta(voronoi.KernelParams(alpha, tau, t, 1.0))
                target = tau / (2 * math.sqrt(2))
                main_dev = max(main_dev, abs(num - target), abs(closed - target))
    ok = worst <= 1e-8 and main_dev <= 0.01
    return CriterionResult(8, "kernel identities", ok,
                           f"{count} grid points, max |numeric-closed|={worst:.2e}; "
                           f"beta=1 max |r - tau/(2 sqrt2)|={main_dev:.2e}")


def extrema_and_j_tau(ctx):
    f = ctx.delta
    cn = 3 * intervals.c_N(1, 3)
    parts = []
    ok = True
    for X in (10**4, 10**5):
        ext = voronoi.find_extrema(f, X, cn)
        level = 0.05 * X**0.25
        good = ext.s_max >= level and ext.s_min <= -level
        ok &= good
        parts.append(f"X={X}: max {ext.s_max:.3f}@{ext.x_max:.0f}, min {ext.s_min:.3f}@{ext.x_min:.0f} "
                     f"(need +-{level:.3f})")
    bar = 1 / (math.pi**2 * math.sqrt(2))
    jp, jm = voronoi.j_tau(f, 1e4, 20, 1), voronoi.j_tau(f, 1e4, 20, -1)
    ok &= jp > bar and jm < -bar
    parts.append(f"J(+1)={jp:.4f} > {bar:.4f}: {jp > bar}, J(-1)={jm:.4f} < {-bar:.4f}: {jm < -bar}")
    return CriterionResult(9, "extrema and J_tau", bool(ok), "; ".join(parts))


def short_interval_counts(ctx):
    parts = []
    ok = True
    for name, f in (("level1:12", ctx.delta), ("level-11", ctx.curve)):
        cn = intervals.c_N(f.level, 3)
        for x in (10**4, 10**5, 10**6):
            rep = intervals.verify_short_interval(f, x, eps=0.1, C=3)
            tri = rep.triple
            tri_ok = False
            if tri is not None:
                s = [intervals.s_star(f, v) for v in tri]
                d1, d2 = s[1] - s[0], s[2] - s[1]
                tri_ok = (d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0 and tri[2] <= x + 3 * cn * math.sqrt(x)
            ok &= bool(rep.passed) and tri_ok
            parts.append(f"{name} x={x}: +{rep.plus_count}/-{rep.minus_count} >= {rep.threshold:.2f}"
                         f"{'' if rep.passed else ' FAIL'}, triple {'ok' if tri_ok else 'missing'}")
    return CriterionResult(10, "short-interval counts", bool(ok), "; ".join(parts))


CRITERIA = {
    1: exact_coefficients,
    2: deligne,
    3: level_prime,
    4: bfree_density,
    5: linear_lower_bound,
    6: moebius,
    7: voronoi_formula,
    8: kernel_identities,
    9: extrema_and_j_tau,
    10: short_interval_counts,
}


def run_all(only=None, ctx=None):
    ctx = ctx or Context()
    return [CRITERIA[n](ctx) for n in sorted(only or CRITERIA)]
