"""Exclusion set, B-free sieve and sign partition behind the linear lower bound
for the number of positive and negative eigenvalues.

The exclusion set holds the primes with a(p) = 0, the level primes, the least
prime p' with a(p') < 0, and p^2 for every other prime. Integers divisible by
none of these are squarefree, coprime to p'N and have nonzero eigenvalue.
Multiplying such an integer by p' flips the sign of its eigenvalue, so both
sign classes are at least as large as the B-free integers up to x/p'.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import primes_up_to
from .errors import InvariantViolation, UsageError
from .forms import least_negative_prime

ZERO_PRIME = "zero-eigenvalue prime"
LEVEL_PRIME = "level prime"
NEGATIVE_PRIME = "p'"
SQUARED_PRIME = "squared prime"

DEFAULT_BLOCK = 1 << 20


@dataclass(frozen=True)
class BSet:
    elements: tuple
    provenance: dict = field(default_factory=dict)
    prime_bound: int | None = None
    # primes that enter to the first power, needed for the density tail
    first_power_primes: tuple = ()

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, b):
        return b in self.provenance

    @classmethod
    def of(cls, elements):
        """Bare exclusion set with no prime bound (no density tail)."""
        elements = tuple(sorted(set(int(b) for b in elements)))
        if any(b <= 1 for b in elements):
            raise UsageError("exclusion set elements must exceed 1")
        return cls(elements, {b: "given" for b in elements})


def build_bset(f, P=None):
    """Exclusion set for ``f``; squared primes stop at ``P``, zero primes run to the table end."""
    P = math.isqrt(f.bound) if P is None else int(P)
    if P > f.bound:
        raise UsageError(f"prime bound P={P} exceeds coefficient table ({f.bound})")
    pneg = least_negative_prime(f)
    prov = {}
    for p in f.level_primes:
        prov[p] = LEVEL_PRIME
    prov[pneg] = NEGATIVE_PRIME
    # zero primes are needed everywhere in the table, squares only up to P
    for p in primes_up_to(f.bound):
        p = int(p)
        if p in prov:
            continue
        if f.coeffs[p] == 0:
            prov[p] = ZERO_PRIME
        elif p <= P:
            prov[p * p] = SQUARED_PRIME
    first = tuple(sorted(b for b, kind in prov.items() if kind != SQUARED_PRIME))
    return BSet(tuple(sorted(prov)), prov, P, first)


@dataclass(frozen=True)
class BFreeSieve:
    limit: int
    membership: np.ndarray  # bool, index n in [0, limit]; index 0 is False

    def members(self, upto=None):
        upto = self.limit if upto is None else min(int(upto), self.limit)
        return np.flatnonzero(self.membership[: upto + 1])

    def count(self, upto=None):
        upto = self.limit if upto is None else min(int(math.floor(upto)), self.limit)
        if upto < 1:
            return 0
        return int(np.count_nonzero(self.membership[: upto + 1]))

    def __contains__(self, n):
        return 1 <= n <= self.limit and bool(self.membership[n])


def sieve_bfree(bset, x, block=DEFAULT_BLOCK):
    """Mark n in [1, x] divisible by no element of ``bset``, block by block."""
    x = int(x)
    if x < 1:
        raise UsageError("sieve limit must be >= 1")
    elements = [b for b in bset if b <= x]
    out = np.zeros(x + 1, dtype=bool)
    for lo in range(1, x + 1, block):
        hi = min(lo + block, x + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for b in elements:
            start = -(-lo // b) * b
            if start < hi:
                seg[start - lo :: b] = False
        out[lo:hi] = seg
    return BFreeSieve(x, out)


def density_product(bset):
    """prod (1 - 1/b) over stored elements, times the squared-prime tail beyond P.

    The tail prod_{p > P} (1 - p^-2) comes from the Euler product 6/pi^2.
    """
    dens = math.prod(1.0 - 1.0 / b for b in bset)
    P = bset.prime_bound
    if P is None:
        return dens
    head = math.prod(1.0 - 1.0 / (p * p) for p in primes_up_to(P) if p >= 2)
    tail = (6.0 / math.pi**2) / head
    # level primes or p' above P are excluded to the first power, not squared
    for p in bset.first_power_primes:
        if p > P:
            tail /= 1.0 - 1.0 / (p * p)
    return dens * tail


@dataclass(frozen=True)
class SignPartition:
    plus: np.ndarray
    minus: np.ndarray
    limit: int

    def count(self, upto):
        return (int(np.searchsorted(self.plus, upto, side="right")),
                int(np.searchsorted(self.minus, upto, side="right")))


def partition_signs(f, sieve):
    if f.bound < sieve.limit:
        raise UsageError(f"coefficient table ({f.bound}) shorter than sieve limit ({sieve.limit})")
    members = sieve.members()
    s = f.signs[members]
    if (s == 0).any():
        bad = int(members[np.argmax(s == 0)])
        raise InvariantViolation(f"B-free n={bad} has a(n)=0")
    return SignPartition(members[s > 0], members[s < 0], sieve.limit)


def lower_bound_count(f, partition, x, pneg=None):
    """(|N+ cap [1,x]|, |N- cap [1,x]|) with N+- = A+- union p' A-+."""
    pneg = least_negative_prime(f) if pneg is None else pneg
    x = math.floor(x)
    if x > partition.limit:
        raise UsageError(f"x={x} exceeds sieve limit ({partition.limit})")
    plus, minus = partition.count(x)
    plus_scaled, minus_scaled = partition.count(x // pneg)
    # a p' is never B-free, so the two pieces are disjoint
    return plus + minus_scaled, minus + plus_scaled


def direct_sign_count(f, x):
    """Exact (N+(x), N-(x)) over n <= x coprime to N."""
    x = math.floor(x)
    if x > f.bound:
        raise UsageError(f"x={x} exceeds coefficient table ({f.bound})")
    s = f.signs[1 : x + 1][f.coprime_mask[1 : x + 1]]
    return int(np.count_nonzero(s > 0)), int(np.count_nonzero(s < 0))


def write_csv(f, sieve, fh):
    """Rows ``n, bfree, sign`` for 1 <= n <= sieve.limit."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "bfree", "sign"])
    symbols = {1: "+", -1: "-", 0: "0"}
    for n in range(1, sieve.limit + 1):
        writer.writerow([n, int(sieve.membership[n]), symbols[int(f.signs[n])]])
