"""Small arithmetic helpers: sieves and divisor data for integers up to ~10^7."""

import math

import numpy as np
from sympy import divisors, factorint


def prime_sieve(limit):
    """Boolean array ``is_prime`` of length ``limit + 1``."""
    limit = max(int(limit), 1)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return is_prime


def primes_up_to(limit):
    return np.flatnonzero(prime_sieve(limit))


def smallest_prime_factor(limit):
    """spf[n] for 2 <= n <= limit; spf[0] = spf[1] = 0."""
    limit = max(int(limit), 1)
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def divisor_count(limit):
    """d(n) for 0 <= n <= limit (d(0) is set to 0)."""
    limit = max(int(limit), 1)
    spf = smallest_prime_factor(limit)
    d = np.ones(limit + 1, dtype=np.int64)
    d[0] = 0
    rem = np.arange(limit + 1, dtype=np.int64)
    idx = np.arange(2, limit + 1)
    # peel one distinct prime per pass
    while idx.size:
        r = rem[idx]
        p = spf[r]
        e = np.zeros_like(r)
        while True:
            hit = (r % p) == 0
            if not hit.any():
                break
            r = np.where(hit, r // p, r)
            e += hit
        d[idx] *= e + 1
        rem[idx] = r
        idx = idx[r > 1]
    return d


def is_squarefree(n):
    return n >= 1 and all(e == 1 for e in factorint(n).values())


def prime_factors(n):
    return sorted(factorint(n))


def omega(n):
    return len(factorint(n))


def mobius(n):
    fac = factorint(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def squarefree_divisors(n):
    """Divisors of a squarefree ``n`` paired with (-1)^omega(d)."""
    return [(d, -1 if omega(d) % 2 else 1) for d in divisors(n)]


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1
