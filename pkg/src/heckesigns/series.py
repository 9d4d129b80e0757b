"""Exact truncated q-series over Python integers.

Products use Kronecker substitution: both operands are packed into one big
integer at a slot width wide enough that no slot overflows, multiplied once
(GMP when gmpy2 is available), and unpacked. The result is bit-exact.
"""

from dataclasses import dataclass

from .errors import UnsupportedWeightError, UsageError

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

# weight -> (power of E4, power of E6) multiplying Delta
_LEVEL1_FACTORS = {12: (0, 0), 16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients of q^0 .. q^(length-1), exact integers."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise UsageError("series length must be positive")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def length(self):
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __mul__(self, other):
        return mul(self, other)

    @classmethod
    def one(cls, length):
        return cls((1,) + (0,) * (length - 1))


def _slot_offset(n, width):
    return int.from_bytes((b"\x00" * (width - 1) + b"\x80") * n, "little")


def _pack(coeffs, width):
    half = 1 << (8 * width - 1)
    raw = b"".join((c + half).to_bytes(width, "little") for c in coeffs)
    return int.from_bytes(raw, "little") - _slot_offset(len(coeffs), width)


def _unpack(value, n, width):
    value += _slot_offset(n, width)
    nbytes = n * width
    # only the low n slots are wanted; higher slots are truncated away
    value &= (1 << (8 * nbytes)) - 1
    raw = value.to_bytes(nbytes, "little")
    half = 1 << (8 * width - 1)
    frm = int.from_bytes
    return [frm(raw[i * width : (i + 1) * width], "little") - half for i in range(n)]


def _convolve(a, b, n):
    """Low ``n`` coefficients of the product of integer lists ``a`` and ``b``."""
    a = list(a[:n])
    b = list(b[:n])
    ma = max((abs(c) for c in a), default=0)
    mb = max((abs(c) for c in b), default=0)
    if ma == 0 or mb == 0:
        return [0] * n
    bits = ma.bit_length() + mb.bit_length() + n.bit_length() + 2
    width = (bits + 7) // 8
    pa, pb = _pack(a, width), _pack(b, width)
    if gmpy2 is not None:
        prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb))
    else:  # pragma: no cover
        prod = pa * pb
    return _unpack(prod, n, width)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the common length."""
    if a.length != b.length:
        raise UsageError(f"length mismatch: {a.length} != {b.length}")
    return TruncatedSeries(_convolve(a.coeffs, b.coeffs, a.length))


def _eta_cubed(length):
    # Jacobi: prod (1-q^n)^3 = sum_m (-1)^m (2m+1) q^(m(m+1)/2)
    c = [0] * length
    m = 0
    while m * (m + 1) // 2 < length:
        c[m * (m + 1) // 2] = (-1) ** m * (2 * m + 1)
        m += 1
    return c


def eta_power_24(length: int) -> TruncatedSeries:
    """Discriminant form q * prod_{n>=1} (1 - q^n)^24, truncated at ``length``."""
    if length < 2:
        raise UsageError("eta_power_24 needs length >= 2")
    s = _eta_cubed(length)
    for _ in range(3):  # cube -> 6th -> 12th -> 24th power
        s = _convolve(s, s, length)
    return TruncatedSeries([0] + s[: length - 1])


def _sigma_table(power, length):
    sigma = [0] * length
    for d in range(1, length):
        dp = d**power
        for m in range(d, length, d):
            sigma[m] += dp
    return sigma


def eisenstein(weight: int, length: int) -> TruncatedSeries:
    """E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight == 4:
        factor = 240
    elif weight == 6:
        factor = -504
    else:
        raise UsageError(f"unsupported Eisenstein weight {weight}; use 4 or 6")
    if length < 1:
        raise UsageError("length must be positive")
    sigma = _sigma_table(weight - 1, length)
    return TruncatedSeries([1] + [factor * s for s in sigma[1:]])


def level1_eigenform(k: int, length: int) -> TruncatedSeries:
    """Normalized cusp eigenform of level 1 and weight ``k`` as Delta * E4^a * E6^b.

    Only weights whose cusp space is one-dimensional are supported.
    """
    if k not in _LEVEL1_FACTORS:
        raise UnsupportedWeightError(
            f"weight {k} unsupported; level-1 one-dimensional cusp spaces: {SUPPORTED_WEIGHTS}"
        )
    series = eta_power_24(length)
    a, b = _LEVEL1_FACTORS[k]
    for _ in range(a):
        series = mul(series, eisenstein(4, length))
    for _ in range(b):
        series = mul(series, eisenstein(6, length))
    return series
