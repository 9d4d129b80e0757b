"""Adaptive Simpson quadrature, refined breadth-first over numpy arrays."""

import math

import numpy as np

MAX_DEPTH = 48


def adaptive_simpson(func, a, b, tol=1e-9, panels=1, max_depth=MAX_DEPTH):
    """Integrate a vectorized ``func`` over [a, b] to absolute tolerance ``tol``.

    Each panel is accepted once |S(left) + S(right) - S(whole)| <= 15 tol_panel,
    with the tolerance halved on every split; accepted panels carry the usual
    Richardson correction. All panels at one depth are evaluated together.

    Oscillating integrands can fool the first error estimate when the samples
    fall on a common phase; pass ``panels`` of a few per period to avoid that.
    """
    if a == b:
        return 0.0
    grid = np.linspace(a, b, int(panels) + 1)
    lo, hi = grid[:-1], grid[1:]
    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = func(lo), func(mid), func(hi)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    tols = np.full(lo.size, tol / lo.size)
    accepted = []
    for depth in range(max_depth + 1):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f_lm, f_rm = func(lm), func(rm)
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tols
        if depth == max_depth:
            done[:] = True
        accepted.append(left[done] + right[done] + err[done] / 15.0)
        keep = ~done
        if not keep.any():
            break
        # children: [lo, mid] and [mid, hi]
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        new_mid = np.concatenate([lm[keep], rm[keep]])
        f_lo, f_hi, f_mid = (np.concatenate([f_lo[keep], f_mid[keep]]),
                             np.concatenate([f_mid[keep], f_hi[keep]]),
                             np.concatenate([f_lm[keep], f_rm[keep]]))
        whole = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([tols[keep], tols[keep]]) / 2.0
        mid = new_mid
    return math.fsum(np.concatenate(accepted))


def simpson_panels(func, edges, sub=4):
    """Composite Simpson on every [edges[i], edges[i+1]] with ``sub`` subintervals.

    Returns one integral per panel. ``sub`` must be even.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    h = (hi - lo) / sub
    weights = np.ones(sub + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    nodes = lo[:, None] + h[:, None] * np.arange(sub + 1)[None, :]
    vals = func(nodes)
    return (vals * weights).sum(axis=1) * h / 3.0
