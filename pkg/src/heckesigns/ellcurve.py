"""Frobenius traces a(p) = p + 1 - #E(F_p) for Weierstrass curves over Q.

Small primes are counted directly. Above ``NAIVE_LIMIT`` the group order is
pinned down by baby-step/giant-step on points of the curve and of its
quadratic twist (Mestre's trick), which terminates for p > 229.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor

from sympy.ntheory import sqrt_mod

from .arith import legendre, primes_up_to
from .errors import InvalidLevelError

NAIVE_LIMIT = 1000
_MAX_ROUNDS = 64


def invariants(a1, a2, a3, a4, a6):
    """Return (b2, b4, b6, b8, c4, c6, discriminant)."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, c4, c6, disc


def count_points_naive(coeffs, p):
    """#E(F_p) including the point at infinity, by enumerating x.

    Valid for singular reductions as well (the singular point is counted once).
    """
    a1, a2, a3, a4, a6 = (c % p for c in coeffs)
    total = 1
    if p == 2:
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                    total += 1
        return total
    # (2y + a1 x + a3)^2 = 4(x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
    is_sq = [False] * p
    for y in range(1, p):
        is_sq[y * y % p] = True
    for x in range(p):
        disc = (4 * (((x + a2) * x + a4) * x + a6) + (a1 * x + a3) ** 2) % p
        total += 1 if disc == 0 else (2 if is_sq[disc] else 0)
    return total


def _add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _scale(k, P, A, p):
    R = None
    while k:
        if k & 1:
            R = _add(R, P, A, p)
        P = _add(P, P, A, p)
        k >>= 1
    return R


def _annihilators(P, lo, hi, A, p):
    """All m in [lo, hi] with m*P = O, by baby-step/giant-step."""
    width = hi - lo
    s = math.isqrt(width) + 1
    neg = (P[0], -P[1] % p)
    baby = {}
    R = None
    for i in range(s):
        baby.setdefault(R, []).append(i)  # R = -i*P
        R = _add(R, neg, A, p)
    G = _scale(lo, P, A, p)
    step = _scale(s, P, A, p)
    found = []
    for g in range(width // s + 1):
        for i in baby.get(G, ()):
            j = g * s + i
            if j <= width:
                found.append(lo + j)
        G = _add(G, step, A, p)
    return found


def _next_point(A, B, p, x):
    while True:
        rhs = (x * x * x + A * x + B) % p
        if rhs and pow(rhs, (p - 1) // 2, p) == 1:
            return (x, sqrt_mod(rhs, p)), x + 1
        x += 1


def _order_short(A, B, p):
    """#E(F_p) for y^2 = x^3 + A x + B with p > 229 and nonsingular reduction."""
    r = math.isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    cands = set(range(lo, hi + 1))
    d = 2
    while legendre(d, p) != -1:
        d += 1
    At, Bt = A * d * d % p, B * d * d * d % p
    xe = xt = 0
    for _ in range(_MAX_ROUNDS):
        P, xe = _next_point(A, B, p, xe)
        cands.intersection_update(_annihilators(P, lo, hi, A, p))
        if len(cands) == 1:
            return cands.pop()
        # twist order is 2p + 2 - #E
        Q, xt = _next_point(At, Bt, p, xt)
        tw = _annihilators(Q, 2 * p + 2 - hi, 2 * p + 2 - lo, At, p)
        cands.intersection_update(2 * p + 2 - m for m in tw)
        if len(cands) == 1:
            return cands.pop()
    return None


def trace_of_frobenius(coeffs, p):
    """a(p) = p + 1 - #E(F_p) at a prime of good reduction."""
    if p < NAIVE_LIMIT:
        return p + 1 - count_points_naive(coeffs, p)
    c4, c6 = invariants(*coeffs)[4:6]
    order = _order_short(-27 * c4 % p, -54 * c6 % p, p)
    if order is None:  # pragma: no cover
        order = count_points_naive(coeffs, p)
    return p + 1 - order


def bad_prime_sign(coeffs, p):
    """a(p) for p dividing the discriminant: +1 split node, -1 non-split node.

    Raises InvalidLevelError on a cusp (additive reduction).
    """
    c4, c6, disc = invariants(*coeffs)[4:]
    if disc % p:
        raise InvalidLevelError(f"p={p} divides the level but the curve has good reduction there")
    if p > 3:
        if c4 % p == 0:
            raise InvalidLevelError(f"additive reduction at p={p}: level is not squarefree")
        # node tangents are rational iff -c6 is a square mod p
        return legendre(-c6, p)
    ap = p + 1 - count_points_naive(coeffs, p)
    if ap == 0:
        raise InvalidLevelError(f"additive reduction at p={p}: level is not squarefree")
    return ap


def _traces_chunk(args):
    coeffs, primes = args
    return [trace_of_frobenius(coeffs, p) for p in primes]


def worker_count():
    try:
        return max(1, int(os.environ.get("HECKE_THREADS", "1")))
    except ValueError:
        return 1


def prime_traces(coeffs, level, bound):
    """{p: a(p)} for all primes p <= bound."""
    disc = invariants(*coeffs)[6]
    if disc == 0:
        raise InvalidLevelError("singular curve")
    primes = [int(p) for p in primes_up_to(bound)]
    good = []
    traces = {}
    for p in primes:
        if level % p == 0:
            traces[p] = bad_prime_sign(coeffs, p)
        elif disc % p == 0:
            raise InvalidLevelError(f"bad reduction at p={p} but p does not divide N={level}")
        else:
            good.append(p)
    workers = min(worker_count(), max(1, len(good) // 2000))
    if workers > 1:
        chunks = [good[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            for chunk, vals in zip(chunks, pool.map(_traces_chunk, [(coeffs, c) for c in chunks])):
                traces.update(zip(chunk, vals))
    else:
        traces.update((p, trace_of_frobenius(coeffs, p)) for p in good)
    return traces
