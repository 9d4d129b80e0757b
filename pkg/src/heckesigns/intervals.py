"""Same-sign eigenvalue counts in windows of length C_N sqrt(x)."""

import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from sympy import divisors

from .errors import UsageError
from .voronoi import find_extrema, prefix_sums

log = logging.getLogger(__name__)

DEFAULT_C = 3.0
DEFAULT_EPS = 0.1
DEFAULT_PSI_EXPONENT = 3
TRIPLE_THRESHOLD = 0.05


def psi(N):
    """Psi(N) = sum over d | N of d^(-1/2) log(2d)."""
    if N < 1:
        raise UsageError("N must be >= 1")
    return math.fsum(math.log(2 * d) / math.sqrt(d) for d in divisors(N))


def c_N(N, C=DEFAULT_C, exponent=DEFAULT_PSI_EXPONENT):
    if C < 0:
        raise UsageError("C must be non-negative")
    return C * math.sqrt(N) * psi(N) ** exponent


@dataclass
class IntervalReport:
    x: float
    h: float
    plus_count: int
    minus_count: int
    threshold: float = float("nan")
    passed: bool | None = None
    triple: tuple | None = None

    def to_dict(self):
        return {
            "x": _num(self.x),
            "h": _num(self.h),
            "plus": self.plus_count,
            "minus": self.minus_count,
            "threshold": _num(self.threshold),
            "pass": self.passed,
            "triple": list(self.triple) if self.triple else None,
        }


def _num(v):
    return float(f"{v:.12g}")


def window_counts(f, x, h):
    """Sign counts of a(n) over integers n in (x, x + h] coprime to N."""
    if h < 0:
        raise UsageError("window length must be non-negative")
    lo, hi = math.floor(x), math.floor(x + h)
    if hi > f.bound:
        raise UsageError(f"window end {x + h:.1f} exceeds coefficient table ({f.bound})")
    s = f.signs[lo + 1 : hi + 1][f.coprime_mask[lo + 1 : hi + 1]]
    return IntervalReport(x, h, int(np.count_nonzero(s > 0)), int(np.count_nonzero(s < 0)))


def alternating_triple(f, x, C_N, threshold=TRIPLE_THRESHOLD):
    """Three points x1 < x2 < x3 in [x, x + 3 C_N sqrt(x)] where S* alternates in sign
    with |S*(xi)| >= threshold (N x)^(1/4); None when the windows do not provide them.

    Extrema are taken on [x, x + C_N sqrt(x)] and on [y, y + C_N sqrt(y)] with
    y = x + C_N sqrt(x).
    """
    if C_N <= 0:
        return None
    y = x + C_N * math.sqrt(x)
    if math.floor(y + C_N * math.sqrt(y)) > f.bound:
        raise UsageError("alternating_triple window exceeds coefficient table")
    level = threshold * (f.level * x) ** 0.25
    first, second = find_extrema(f, x, C_N), find_extrema(f, y, C_N)
    if min(first.s_max, second.s_max) < level or max(first.s_min, second.s_min) > -level:
        return None
    # order the first window's extrema, then continue from the second window
    pair = sorted([(first.x_max, 1), (first.x_min, -1)])
    x1, x2 = pair[0][0], pair[1][0]
    x3 = second.x_min if pair[1][1] > 0 else second.x_max
    if not x1 < x2 < x3:
        return None
    return (x1, x2, x3)


def verify_short_interval(f, x, eps=DEFAULT_EPS, C=DEFAULT_C, exponent=DEFAULT_PSI_EXPONENT,
                          x_floor=None, with_triple=True):
    """Check min(plus, minus) >= (N x)^(1/4 - eps) on (x, x + C_N sqrt(x)]."""
    cn = c_N(f.level, C, exponent)
    h = cn * math.sqrt(x)
    report = window_counts(f, x, h)
    report.threshold = (f.level * x) ** (0.25 - eps)
    report.passed = min(report.plus_count, report.minus_count) >= report.threshold
    if with_triple and cn > 0:
        report.triple = alternating_triple(f, x, cn)
    if x_floor is not None and x < x_floor:
        log.warning("x=%g lies below the configured floor %g; result is advisory", x, x_floor)
    return report


def s_star(f, x):
    """S*(x) read from the cached prefix table."""
    n = math.floor(x)
    if n > f.bound:
        raise UsageError(f"x={x} exceeds coefficient table ({f.bound})")
    return float(prefix_sums(f, coprime=True)[max(n, 0)])


def max_abs_lambda(f, a, b):
    """max |lambda(n)| over integers a < n <= b with (n, N) = 1."""
    lo, hi = math.floor(a), math.floor(b)
    vals = np.abs(f.lambdas[lo + 1 : hi + 1][f.coprime_mask[lo + 1 : hi + 1]])
    return float(vals.max()) if vals.size else 0.0


def write_json(reports, fh):
    data = [r.to_dict() for r in reports]
    json.dump(data[0] if len(data) == 1 else data, fh, indent=2)
    fh.write("\n")
