import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckesigns import forms
from heckesigns.ellcurve import bad_prime_sign, count_points_naive, trace_of_frobenius
from heckesigns.errors import (InvalidLevelError, InvariantViolation, LoadError,
                               SearchExhaustedError, UsageError)
from heckesigns.forms import EigenForm

from conftest import CURVE_11


def eta_series(length):
    """prod (1 - q^n) from the pentagonal number theorem."""
    c = np.zeros(length, dtype=np.int64)
    k = 0
    while True:
        hit = False
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2):
            if m < length:
                c[m] = (-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    return c


def curve_oracle(length):
    """q eta(z)^2 eta(11 z)^2 expanded to q^(length-1)."""
    e = eta_series(length)
    e11 = np.zeros(length, dtype=np.int64)
    e11[::11] = e[: len(e11[::11])]
    prod = np.convolve(np.convolve(e, e)[:length], np.convolve(e11, e11)[:length])[:length]
    return [0] + [int(v) for v in prod[: length - 1]]


def brute_count(coeffs, p):
    a1, a2, a3, a4, a6 = coeffs
    return 1 + sum(1 for x in range(p) for y in range(p)
                   if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0)


def test_delta_values(delta):
    assert [delta.a(n) for n in range(1, 6)] == [1, -24, 252, -1472, 4830]
    assert delta.a(6) == -6048


def test_curve_small_values(curve):
    assert curve.a(2) == -2
    assert curve.a(3) == -1
    assert curve.a(11) in (1, -1)


def test_curve_matches_eta_product(curve):
    # covers the baby-step/giant-step range above p = 1000
    length = 8001
    assert curve.coeffs[:length] == curve_oracle(length)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13, 101])
def test_point_count_brute_force(p):
    assert count_points_naive(CURVE_11, p) == brute_count(CURVE_11, p)


@pytest.mark.parametrize("p", [1009, 1423, 2003, 7919, 10007])
def test_bsgs_agrees_with_direct_count(p):
    assert trace_of_frobenius(CURVE_11, p) == p + 1 - count_points_naive(CURVE_11, p)


def test_hecke_extend_from_primes(delta):
    primes = {p: delta.a(p) for p in (2, 3, 5, 7, 11)}
    table = forms.hecke_extend(primes, 12, 1, 12)
    assert table[4] == -1472
    assert table[6] == -6048
    assert table[1:13] == delta.coeffs[1:13]


def test_hecke_extend_level_prime_powers(curve):
    a11 = curve.a(11)
    assert curve.a(121) == a11**2
    assert curve.a(1331) == a11**3


def test_hecke_extend_missing_prime():
    with pytest.raises(UsageError):
        forms.hecke_extend({2: 1}, 2, 1, 5)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 380), st.integers(2, 380))
def test_multiplicative(delta, m, n):
    if math.gcd(m, n) == 1:
        assert delta.a(m * n) == delta.a(m) * delta.a(n)


def test_lambda_values(delta, curve):
    assert forms.lam(delta, 2) == pytest.approx(-0.5303300859, abs=1e-10)
    assert forms.lam(curve, 11) == pytest.approx(curve.a(11) * 0.3015113446, abs=1e-10)


def test_signs_agree_with_floats(delta, curve):
    for f in (delta, curve):
        assert np.array_equal(np.sign(f.lambdas), f.signs.astype(float))


def test_deligne_holds(delta, curve):
    assert forms.verify_deligne(delta) is None
    assert forms.verify_deligne(curve) is None


def test_deligne_counterexample():
    fake = EigenForm(2, 1, [0, 1, 5, 1, 25], source="file")
    assert forms.verify_deligne(fake) == 2


def test_least_negative_prime(delta, curve, small_forms):
    assert forms.least_negative_prime(delta) == 2
    assert forms.least_negative_prime(curve) == 2
    for f in small_forms.values():
        p = forms.least_negative_prime(f)
        assert f.a(p) < 0 and all(f.a(q) >= 0 for q in (2, 3, 5, 7, 11, 13) if q < p)


def test_least_negative_prime_exhausted():
    fake = EigenForm(2, 1, [0, 1, 1, 1, 0, 1], source="file")
    with pytest.raises(SearchExhaustedError):
        forms.least_negative_prime(fake)


def test_epsilon(curve):
    assert forms.epsilon(curve, 11) == curve.a(11)
    with pytest.raises(UsageError):
        forms.epsilon(curve, 2)
    broken = EigenForm(2, 11, curve.coeffs[:11] + [2], source="file")
    with pytest.raises(InvariantViolation):
        forms.epsilon(broken, 11)


@pytest.mark.parametrize("kwargs", [dict(weight=3, level=1), dict(weight=2, level=4), dict(weight=0, level=1)])
def test_eigenform_validation(kwargs):
    with pytest.raises(UsageError):
        EigenForm(coeffs=[0, 1], source="file", **kwargs)


def test_a1_must_be_one():
    with pytest.raises(InvariantViolation):
        EigenForm(2, 1, [0, 2], source="file")


def test_index_out_of_range(delta):
    with pytest.raises(UsageError):
        delta.a(0)
    with pytest.raises(UsageError):
        delta.a(delta.bound + 1)


def test_file_round_trip(tmp_path, curve):
    small = forms.from_elliptic_curve(CURVE_11, 11, 500)
    path = tmp_path / "c.txt"
    forms.to_file(small, path)
    back = forms.from_file(path)
    assert (back.weight, back.level) == (2, 11)
    assert back.coeffs == curve.coeffs[:501]


def test_file_format_example():
    text = "k=12 N=1\n# level1:12\n1 1\n2 -24\n3 252\n4 -1472\n"
    f = forms.read_coefficients(io.StringIO(text))
    assert f.bound == 4 and f.a(4) == -1472


@pytest.mark.parametrize("text, index", [
    ("k=12 N=1\n1 1\n3 252\n", 2),
    ("k=12 N=1\n1 1\n2 -24 7\n", 2),
    ("k=12 N=1\n1 1\n2 x\n", 2),
    ("k=12 N=1\n1 2\n", 1),
    ("k=12 N=1\n1 1\n2 -24\n3 252\n4 -1472\n5 4830\n6 0\n", 6),
    ("k=2 N=11\n" + "".join(f"{n} {a}\n" for n, a in enumerate([1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 3], 1)), 11),
])
def test_load_errors_report_index(text, index):
    with pytest.raises(LoadError) as info:
        forms.read_coefficients(io.StringIO(text))
    assert info.value.index == index


@pytest.mark.parametrize("text", ["", "k=12\n1 1\n", "k=3 N=1\n1 1\n", "k=2 N=4\n1 1\n"])
def test_load_errors_header(text):
    with pytest.raises(LoadError):
        forms.read_coefficients(io.StringIO(text))


def test_additive_reduction_rejected():
    with pytest.raises(InvalidLevelError):
        bad_prime_sign((0, 0, 0, 0, 5), 5)
    with pytest.raises(InvalidLevelError):
        forms.from_elliptic_curve((0, 0, 0, 0, 5), 30, 100)


def test_wrong_conductor_rejected():
    with pytest.raises(InvalidLevelError):
        forms.from_elliptic_curve(CURVE_11, 22, 100)
    with pytest.raises(InvalidLevelError):
        forms.from_elliptic_curve(CURVE_11, 1, 100)


def test_coprime_pairs_deterministic():
    a = forms.random_coprime_pairs(10**4, 50, seed=3)
    assert a == forms.random_coprime_pairs(10**4, 50, seed=3)
    assert all(math.gcd(m, n) == 1 and m * n <= 10**4 for m, n in a)
