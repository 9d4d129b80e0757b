"""Partial sums of Hecke eigenvalues and their truncated Voronoi expansion.

For x >= 1 and truncation length M,

    S*(x) ~ s_f (N x)^(1/4) / (pi sqrt 2)
            * sum_{d | N} (-1)^omega(d) lambda(d) d^(-1/4)
              * sum_{n <= M} lambda(n) n^(-3/4) cos(4 pi sqrt(n x / (d N)) - pi/4)

where S*(x) sums lambda(n) over n <= x coprime to N. Also here: the Fejer
kernel w, the smoothing kernel K_tau, the integrals r_beta and J_tau, and the
extremum scan over short windows.
"""

import csv
import json
import math
import re
import statistics
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .arith import mobius, squarefree_divisors
from .errors import UsageError
from .quadrature import adaptive_simpson, simpson_panels

PREFIX_BLOCK = 4096
QUAD_TOL = 1e-9


# -- partial sums -------------------------------------------------------------

def _compensated_prefix(values):
    """Prefix sums with per-block cumsum and correctly rounded block offsets."""
    out = np.empty_like(values)
    offset = 0.0
    carry = []
    for lo in range(0, values.size, PREFIX_BLOCK):
        block = values[lo : lo + PREFIX_BLOCK]
        out[lo : lo + block.size] = offset + np.cumsum(block)
        carry.append(math.fsum(block))
        offset = math.fsum(carry)
    return out


@lru_cache(maxsize=8)
def prefix_sums(f, coprime=False):
    """Array P with P[n] = S(n) (or S*(n) when ``coprime``); P[0] = 0."""
    lam = f.lambdas * f.coprime_mask if coprime else f.lambdas.copy()
    lam[0] = 0.0
    return _compensated_prefix(lam)


def _index(f, x):
    n = math.floor(x)
    if n > f.bound:
        raise UsageError(f"x={x} exceeds coefficient table ({f.bound})")
    return max(n, 0)


def partial_sum(f, x):
    """S(x) = sum of lambda(n) over n <= x."""
    n = _index(f, x)
    return math.fsum(f.lambdas[1 : n + 1])


def partial_sum_coprime(f, x):
    """S*(x) = sum of lambda(n) over n <= x with (n, N) = 1."""
    n = _index(f, x)
    return math.fsum(f.lambdas[1 : n + 1][f.coprime_mask[1 : n + 1]])


def moebius_identity(f, x):
    """S*(x) rebuilt as sum_{d | N} (-1)^omega(d) lambda(d) S(x / d)."""
    if x < 1:
        return 0.0
    terms = []
    for d, sign in squarefree_divisors(f.level):
        if d > f.bound:
            raise UsageError(f"divisor {d} of N outside coefficient table")
        terms.append(sign * f.lambdas[d] * partial_sum(f, x / d))
    return math.fsum(terms)


# -- Voronoi main term ---------------------------------------------------------

def front_sign(f):
    """Sign of the Voronoi main term: mu(N) sign a(N).

    The functional equation contributes i^k mu(N) lambda(N) sqrt(N) and the
    Bessel-type integral a second factor i^k; for even k these compose to
    mu(N) lambda(N) sqrt(N), whose absolute value is 1 for squarefree N.
    """
    if f.weight % 2:
        raise UsageError("weight must be even")
    if f.level > f.bound:
        raise UsageError(f"a(N) unavailable: N={f.level} exceeds table ({f.bound})")
    aN = f.coeffs[f.level]
    return mobius(f.level) * (1 if aN > 0 else -1)


def _cos_sum(coef, n, x, dN):
    arg = 4.0 * math.pi * np.sqrt(n * x / dN) - math.pi / 4.0
    return math.fsum(coef * np.cos(arg))


def _cos_sum_mp(f, M, x, dN):
    import mpmath

    with mpmath.workdps(30):
        x = mpmath.mpf(x)
        pi = mpmath.pi
        total = mpmath.mpf(0)
        e = mpmath.mpf(f.weight - 1) / 2
        for n in range(1, M + 1):
            if f.coeffs[n]:
                lam_n = mpmath.mpf(f.coeffs[n]) / mpmath.mpf(n) ** e
                total += lam_n / mpmath.mpf(n) ** 0.75 * mpmath.cos(
                    4 * pi * mpmath.sqrt(n * x / dN) - pi / 4)
        return float(total)


def main_term(f, x, M, sign=None, precision="double"):
    """Truncated Voronoi main term for S*(x) with M oscillating terms per divisor."""
    M = int(M)
    if M > f.bound:
        raise UsageError(f"M={M} exceeds coefficient table ({f.bound})")
    if M <= 0:
        return 0.0
    if x < 1:
        raise UsageError("main term needs x >= 1")
    if precision not in ("double", "extended"):
        raise UsageError(f"unknown precision mode {precision!r}")
    sign = front_sign(f) if sign is None else sign
    N = f.level
    n = np.arange(1, M + 1, dtype=float)
    coef = f.lambdas[1 : M + 1] / n**0.75
    outer = []
    for d, mu_d in squarefree_divisors(N):
        if precision == "extended":
            inner = _cos_sum_mp(f, M, x, d * N)
        else:
            inner = _cos_sum(coef, n, x, float(d * N))
        outer.append(mu_d * f.lambdas[d] / d**0.25 * inner)
    return sign * (N * x) ** 0.25 / (math.pi * math.sqrt(2.0)) * math.fsum(outer)


@dataclass(frozen=True)
class VoronoiEvaluation:
    x: float
    M: int
    main: float
    direct: float
    residual: float
    sign: int

    @property
    def residual_over_x4(self):
        return self.residual / self.x**0.25


def evaluate(f, x, M, sign=None, precision="double"):
    sign = front_sign(f) if sign is None else sign
    direct = partial_sum_coprime(f, x)
    main = main_term(f, x, M, sign=sign, precision=precision)
    return VoronoiEvaluation(float(x), int(M), main, direct, direct - main, sign)


_POLICY = re.compile(r"^\s*x\s*(?:(?P<op>[/^*])\s*(?P<val>[0-9.eE+-]+))?\s*$")


def truncation(x, policy="x"):
    """M(x) under a policy: 'x', 'x/100', 'x^1.5', a callable, or an int."""
    if callable(policy):
        return int(policy(x))
    if isinstance(policy, (int, np.integer)):
        return int(policy)
    m = _POLICY.match(str(policy))
    if not m:
        raise UsageError(f"bad truncation policy {policy!r}; use x, x/<c>, x*<c> or x^<A>")
    op, val = m.group("op"), m.group("val")
    if op is None:
        return math.floor(x)
    val = float(val)
    if op == "/":
        return math.floor(x / val)
    if op == "*":
        return math.floor(x * val)
    if not 0 < val <= 2:
        raise UsageError("exponent A must lie in (0, 2]")
    return math.floor(x**val)


def residual_scan(f, xs, policy="x", sign=None, precision="double"):
    sign = front_sign(f) if sign is None else sign
    return [evaluate(f, x, truncation(x, policy), sign=sign, precision=precision) for x in xs]


def half_integer_grid(lo, hi, count):
    """``count`` log-spaced points in [lo, hi] snapped to m + 1/2."""
    if count == 1:
        pts = [lo]
    else:
        pts = np.geomspace(lo, hi, count)
    return [math.floor(p) + 0.5 for p in pts]


def scan_summary(evals):
    res = [abs(e.residual) for e in evals]
    scaled = [abs(e.residual_over_x4) for e in evals]
    return {
        "count": len(evals),
        "max_residual": max(res),
        "median_residual": statistics.median(res),
        "max_residual_over_x4": max(scaled),
        "median_residual_over_x4": statistics.median(scaled),
    }


CSV_FIELDS = ["x", "M", "direct", "main", "residual", "residual_over_x4"]


def write_csv(evals, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for e in evals:
        writer.writerow([_g(e.x), e.M, _g(e.direct), _g(e.main), _g(e.residual),
                         _g(e.residual_over_x4)])


def write_json(evals, fh):
    report = {"summary": {k: _num(v) for k, v in scan_summary(evals).items()},
              "evaluations": [{**{k: _num(v) for k, v in asdict(e).items()},
                               "residual_over_x4": _num(e.residual_over_x4)} for e in evals]}
    json.dump(report, fh, indent=2)
    fh.write("\n")


def _g(v):
    return f"{v:.12g}"


def _num(v):
    return float(_g(v)) if isinstance(v, float) else v


# -- kernels -------------------------------------------------------------------

def kernel_w(xi):
    """Fejer kernel (sin(pi xi) / (pi xi))^2, equal to 1 at xi = 0."""
    return np.sinc(xi) ** 2 if isinstance(xi, np.ndarray) else float(np.sinc(xi) ** 2)


def kernel_k(u, alpha, tau):
    """K_tau(u) = (1 - |u|)(1 + tau cos(4 pi alpha u)) on [-1, 1]."""
    return (1.0 - np.abs(u)) * (1.0 + tau * np.cos(4.0 * math.pi * alpha * u))


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    tau: int
    t: int
    beta: float

    def __post_init__(self):
        if self.alpha < 1:
            raise UsageError("alpha must be >= 1")
        if self.tau not in (-1, 1):
            raise UsageError("tau must be +1 or -1")
        if self.beta <= 0:
            raise UsageError("beta must be positive")
        if self.t < 1:
            raise UsageError("t must be >= 1")

    @property
    def alpha_beta(self):
        return 2.0 * self.alpha * math.sqrt(self.beta)

    @property
    def alpha_beta_plus(self):
        return 2.0 * self.alpha * (math.sqrt(self.beta) + 1.0)

    @property
    def alpha_beta_minus(self):
        return 2.0 * self.alpha * (math.sqrt(self.beta) - 1.0)


def r_beta(p, tol=QUAD_TOL):
    """(quadrature, closed form) for the integral of K_tau(u) cos(4pi(t + alpha u)sqrt(beta) - pi/4)."""
    rb = math.sqrt(p.beta)

    def integrand(u):
        return kernel_k(u, p.alpha, p.tau) * np.cos(4.0 * math.pi * (p.t + p.alpha * u) * rb - math.pi / 4.0)

    # K_tau has a kink at u = 0; seed a few panels per period of the fastest mode
    panels = _panels(p.alpha_beta_plus)
    numeric = (adaptive_simpson(integrand, -1.0, 0.0, tol / 2, panels)
               + adaptive_simpson(integrand, 0.0, 1.0, tol / 2, panels))
    weight = (kernel_w(p.alpha_beta) + p.tau / 2 * kernel_w(p.alpha_beta_plus)
              + p.tau / 2 * kernel_w(p.alpha_beta_minus))
    closed = weight * math.cos(4.0 * math.pi * p.t * rb - math.pi / 4.0)
    return numeric, closed


def kernel_mass(alpha, tau, tol=QUAD_TOL):
    """Integral of K_tau over [-1, 1] by quadrature."""
    g = lambda u: kernel_k(u, alpha, tau)  # noqa: E731
    panels = _panels(2.0 * alpha)
    return adaptive_simpson(g, -1.0, 0.0, tol / 2, panels) + adaptive_simpson(g, 0.0, 1.0, tol / 2, panels)


def _panels(freq):
    return 4 * math.ceil(freq) + 7


def euler_factor(N):
    """sum_{d | N} (-1)^omega(d) / d^2 = prod_{p | N} (1 - p^-2)."""
    return math.fsum(s / d**2 for d, s in squarefree_divisors(N))


def j_tau_expected(N, tau):
    return tau / (2.0 * math.sqrt(2.0)) * euler_factor(N)


def j_tau(f, X, alpha, tau, sign=None, sub=4):
    """Convolution of the normalized partial sum F(s) = pi sqrt2 S*(N s^2) / (s_f sqrt(N s))
    against K_tau, with s = t + alpha u, T = sqrt(X / N) and t = floor(T) + 1.

    S*(N s^2) is a step function; the u-axis is cut at every jump and at u = 0,
    and each piece is integrated by composite Simpson with ``sub`` subintervals.
    """
    if tau not in (-1, 1):
        raise UsageError("tau must be +1 or -1")
    N = f.level
    t = math.floor(math.sqrt(X / N)) + 1
    if alpha >= t:
        raise UsageError(f"alpha={alpha} must be smaller than t={t}")
    top = N * (t + alpha) ** 2
    if top > f.bound:
        raise UsageError(f"J_tau needs coefficients up to {math.ceil(top)}, table ends at {f.bound}")
    sign = front_sign(f) if sign is None else sign
    prefix = prefix_sums(f, coprime=True)
    n_lo = math.ceil(N * (t - alpha) ** 2)
    n_hi = math.floor(top)
    jumps = (np.sqrt(np.arange(n_lo, n_hi + 1) / N) - t) / alpha
    edges = np.unique(np.concatenate([[-1.0, 0.0, 1.0], jumps]))
    edges = edges[(edges >= -1.0) & (edges <= 1.0)]
    mids = 0.5 * (edges[:-1] + edges[1:])
    level_idx = np.floor(N * (t + alpha * mids) ** 2).astype(np.int64)
    steps = prefix[level_idx]

    def weight(u):
        return kernel_k(u, alpha, tau) / np.sqrt(N * (t + alpha * u))

    pieces = simpson_panels(weight, edges, sub=sub) * steps
    return math.pi * math.sqrt(2.0) / sign * math.fsum(pieces)


@dataclass(frozen=True)
class Extrema:
    x_max: float
    s_max: float
    x_min: float
    s_min: float


def find_extrema(f, X, C_N):
    """argmax / argmin of S* over [X, X + C_N sqrt(X)].

    S* only changes at integers, so X itself and the integers in (X, X + h]
    exhaust its values on the window.
    """
    h = C_N * math.sqrt(X)
    end = X + h
    if math.floor(end) > f.bound:
        raise UsageError(f"window end {end:.1f} exceeds coefficient table ({f.bound})")
    prefix = prefix_sums(f, coprime=True)
    pts = np.arange(math.floor(X) + 1, math.floor(end) + 1, dtype=np.int64)
    xs = np.concatenate([[X], pts.astype(float)])
    vals = np.concatenate([[prefix[math.floor(X)]], prefix[pts]])
    i, j = int(np.argmax(vals)), int(np.argmin(vals))
    return Extrema(float(xs[i]), float(vals[i]), float(xs[j]), float(vals[j]))
