"""Primitive forms as exact coefficient tables.

An :class:`EigenForm` stores the integer Fourier coefficients a(n) of a
normalized Hecke eigenform of even weight k and squarefree level N. The
normalized eigenvalue is lambda(n) = a(n) / n^((k-1)/2). The integers are the
source of truth; floating-point eigenvalues are derived on demand and their
signs always agree with the integer signs.
"""

import math
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import ellcurve
from .arith import divisor_count, is_squarefree, prime_factors, primes_up_to, smallest_prime_factor
from .errors import InvariantViolation, LoadError, SearchExhaustedError, UsageError
from .series import level1_eigenform

SOURCES = ("level1", "elliptic", "file")


@dataclass(frozen=True, eq=False)
class EigenForm:
    weight: int
    level: int
    coeffs: list  # coeffs[n] = a(n); coeffs[0] is a placeholder 0
    source: str = "file"
    label: str = field(default="")

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2:
            raise UsageError(f"weight must be even and >= 2, got {self.weight}")
        if not is_squarefree(self.level):
            raise UsageError(f"level must be squarefree, got {self.level}")
        if self.source not in SOURCES:
            raise UsageError(f"unknown source tag {self.source!r}")
        if len(self.coeffs) < 2 or self.coeffs[1] != 1:
            raise InvariantViolation("a(1) must equal 1")

    @property
    def bound(self):
        return len(self.coeffs) - 1

    def a(self, n):
        if not 1 <= n <= self.bound:
            raise UsageError(f"index {n} outside table 1..{self.bound}")
        return self.coeffs[n]

    @cached_property
    def level_primes(self):
        return tuple(prime_factors(self.level)) if self.level > 1 else ()

    @cached_property
    def lambdas(self):
        """float64 array, lambdas[n] = lambda_f(n); index 0 holds 0."""
        n = np.arange(self.bound + 1, dtype=float)
        a = np.array([float(c) for c in self.coeffs])
        out = np.zeros(self.bound + 1)
        out[1:] = a[1:] / n[1:] ** ((self.weight - 1) / 2)
        return out

    @cached_property
    def signs(self):
        """int8 array of exact signs of a(n); index 0 holds 0."""
        return np.array([(c > 0) - (c < 0) for c in self.coeffs], dtype=np.int8)

    @cached_property
    def coprime_mask(self):
        """Boolean array, True at n with gcd(n, N) = 1 (False at 0)."""
        mask = np.ones(self.bound + 1, dtype=bool)
        mask[0] = False
        for p in self.level_primes:
            mask[::p] = False
        return mask

    def __repr__(self):
        tag = self.label or self.source
        return f"EigenForm({tag}, k={self.weight}, N={self.level}, bound={self.bound})"


def from_level1(k, bound):
    """The unique normalized eigenform of level 1 and weight k, tabulated to ``bound``."""
    series = level1_eigenform(k, bound + 1)
    return EigenForm(k, 1, list(series.coeffs), source="level1", label=f"level1:{k}")


def hecke_extend(a_on_primes, k, level, bound):
    """Fill a(n) for 1 <= n <= bound from the values a(p) at primes.

    For p not dividing the level, a(p^(v+1)) = a(p) a(p^v) - p^(k-1) a(p^(v-1));
    for p | N, a(p^v) = a(p)^v. Coprime products multiply.
    """
    spf = smallest_prime_factor(bound)
    table = [0] * (bound + 1)
    if bound >= 1:
        table[1] = 1
    for n in range(2, bound + 1):
        p = int(spf[n])
        m, pk = n, 1
        while m % p == 0:
            m //= p
            pk *= p
        if m > 1:
            table[n] = table[pk] * table[m]
            continue
        # n = pk is a prime power
        if pk == p:
            try:
                table[n] = int(a_on_primes[p])
            except KeyError:
                raise UsageError(f"missing a(p) for prime p={p}") from None
        elif level % p == 0:
            table[n] = table[p] * table[n // p]
        else:
            table[n] = table[p] * table[n // p] - p ** (k - 1) * table[n // (p * p)]
    return table


def from_elliptic_curve(weierstrass, level, bound):
    """Weight-2 newform attached to the curve [a1, a2, a3, a4, a6] of conductor ``level``."""
    coeffs = tuple(int(c) for c in weierstrass)
    if len(coeffs) != 5:
        raise UsageError("need five Weierstrass coefficients a1, a2, a3, a4, a6")
    if not is_squarefree(level):
        raise UsageError(f"conductor must be squarefree, got {level}")
    traces = ellcurve.prime_traces(coeffs, level, bound)
    table = hecke_extend(traces, 2, level, bound)
    label = "curve:" + ",".join(map(str, coeffs)) + f",{level}"
    return EigenForm(2, level, table, source="elliptic", label=label)


def lam(f: EigenForm, n: int) -> float:
    """lambda_f(n) = a(n) / n^((k-1)/2)."""
    return f.a(n) / n ** ((f.weight - 1) / 2)


def verify_deligne(f, bound=None):
    """First n <= bound, (n, N) = 1, with a(n)^2 > d(n)^2 n^(k-1); None if none.

    Exact integer comparison throughout.
    """
    bound = f.bound if bound is None else min(bound, f.bound)
    d = divisor_count(bound)
    km1 = f.weight - 1
    mask = f.coprime_mask
    coeffs = f.coeffs
    for n in range(1, bound + 1):
        if not mask[n]:
            continue
        dn = int(d[n])
        if coeffs[n] * coeffs[n] > dn * dn * n**km1:
            return n
    return None


def least_negative_prime(f):
    """Smallest prime p not dividing N with a(p) < 0."""
    for p in primes_up_to(f.bound):
        p = int(p)
        if f.level % p and f.coeffs[p] < 0:
            return p
    raise SearchExhaustedError(
        f"no prime p <= {f.bound} with a(p) < 0 outside the level; enlarge the table"
    )


def epsilon(f, p):
    """Sign of a(p) at a level prime; |a(p)| must equal p^((k-2)/2)."""
    if p not in f.level_primes:
        raise UsageError(f"{p} is not a prime divisor of N={f.level}")
    ap = f.a(p)
    if ap * ap != p ** (f.weight - 2):
        raise InvariantViolation(f"a({p}) = {ap} violates a(p)^2 = p^(k-2)")
    return 1 if ap > 0 else -1


def check_table(k, level, coeffs):
    """First index where the table breaks multiplicativity or the level-prime law.

    Returns (n, reason) or None.
    """
    bound = len(coeffs) - 1
    if bound < 1 or coeffs[1] != 1:
        return 1, "a(1) != 1"
    spf = smallest_prime_factor(bound)
    for n in range(2, bound + 1):
        p = int(spf[n])
        m, pk = n, 1
        while m % p == 0:
            m //= p
            pk *= p
        if m > 1:
            if coeffs[n] != coeffs[pk] * coeffs[m]:
                return n, f"a({n}) != a({pk}) a({m})"
        elif level % p == 0:
            if pk == p and coeffs[p] ** 2 != p ** (k - 2):
                return n, f"a({p})^2 != {p}^{k - 2} at a level prime"
            if pk > p and coeffs[n] != coeffs[p] * coeffs[n // p]:
                return n, f"a({n}) != a({p})^v at a level prime"
    return None


def to_file(f, path):
    with open(path, "w") as fh:
        write_coefficients(f, fh)


def write_coefficients(f, fh):
    fh.write(f"k={f.weight} N={f.level}\n")
    if f.label:
        fh.write(f"# {f.label}\n")
    for n in range(1, f.bound + 1):
        fh.write(f"{n} {f.coeffs[n]}\n")


def from_file(path):
    with open(path) as fh:
        return read_coefficients(fh)


def read_coefficients(lines):
    header = None
    coeffs = [0]
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            try:
                fields = dict(tok.split("=", 1) for tok in line.split())
                header = int(fields["k"]), int(fields["N"])
            except (ValueError, KeyError):
                raise LoadError(f"line {lineno}: expected header 'k=<int> N=<int>'") from None
            continue
        parts = line.split()
        try:
            n, an = int(parts[0]), int(parts[1])
            if len(parts) != 2:
                raise ValueError
        except (ValueError, IndexError):
            raise LoadError(f"line {lineno}: malformed coefficient line {raw.strip()!r}",
                            index=len(coeffs)) from None
        if n != len(coeffs):
            raise LoadError(f"line {lineno}: expected n={len(coeffs)}, got {n}", index=len(coeffs))
        coeffs.append(an)
    if header is None:
        raise LoadError("empty coefficient file")
    k, level = header
    if len(coeffs) < 2:
        raise LoadError("no coefficients", index=1)
    if k < 2 or k % 2:
        raise LoadError(f"weight must be even and >= 2, got {k}")
    if not is_squarefree(level):
        raise LoadError(f"level must be squarefree, got {level}")
    bad = check_table(k, level, coeffs)
    if bad is not None:
        raise LoadError(f"invalid table at n={bad[0]}: {bad[1]}", index=bad[0])
    return EigenForm(k, level, coeffs, source="file")


def random_coprime_pairs(limit, count, seed=0):
    """Deterministic sample of coprime pairs (m, n) with m n <= limit."""
    rng = random.Random(seed)
    pairs = []
    while len(pairs) < count:
        m = rng.randint(2, math.isqrt(limit))
        n = rng.randint(2, limit // m)
        if math.gcd(m, n) == 1:
            pairs.append((m, n))
    return pairs
