import io
import json
import math
import statistics

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckesigns import voronoi
from heckesigns.errors import UsageError
from heckesigns.voronoi import KernelParams

BAR = 1 / (math.pi**2 * math.sqrt(2))


def test_partial_sum_examples(delta):
    assert voronoi.partial_sum(delta, 1) == 1.0
    assert voronoi.partial_sum(delta, 0) == 0.0
    with mpmath.workdps(40):
        want = 1 - 24 / mpmath.mpf(2) ** 5.5 + 252 / mpmath.mpf(3) ** 5.5
    assert voronoi.partial_sum(delta, 3) == pytest.approx(float(want), abs=1e-15)
    assert voronoi.partial_sum(delta, 3.9) == voronoi.partial_sum(delta, 3)


def test_partial_sum_outside_table(delta):
    with pytest.raises(UsageError):
        voronoi.partial_sum(delta, delta.bound + 1)


def test_prefix_table_matches_fsum(delta):
    table = voronoi.prefix_sums(delta)
    for x in (1, 17, 999, 65_536, 150_000):
        assert table[x] == pytest.approx(voronoi.partial_sum(delta, x), abs=1e-11)


def test_coprime_sum_level_one(delta):
    for x in (5, 50, 5000):
        assert voronoi.partial_sum_coprime(delta, x) == voronoi.partial_sum(delta, x)


def test_coprime_sum_drops_level_multiples(curve):
    lam11 = curve.a(11) / math.sqrt(11)
    assert voronoi.partial_sum_coprime(curve, 11) == pytest.approx(voronoi.partial_sum(curve, 11) - lam11,
                                                                    abs=1e-14)


def test_moebius_identity(curve, delta):
    assert voronoi.moebius_identity(curve, 0.5) == 0.0
    for x in range(1, 3001):
        assert abs(voronoi.moebius_identity(curve, x) - voronoi.partial_sum_coprime(curve, x)) <= 1e-9 * x
    assert voronoi.moebius_identity(delta, 777) == voronoi.partial_sum(delta, 777)


def test_front_sign_values(delta, curve, small_forms):
    assert voronoi.front_sign(delta) == 1
    assert voronoi.front_sign(curve) == -curve.a(11)
    assert all(voronoi.front_sign(f) == 1 for f in small_forms.values())


def _correlation(f, hi, sign):
    xs = voronoi.half_integer_grid(100, hi, 200)
    direct = [voronoi.partial_sum_coprime(f, x) for x in xs]
    main = [voronoi.main_term(f, x, math.floor(x), sign=sign) for x in xs]
    return float(np.corrcoef(direct, main)[0, 1])


@pytest.mark.parametrize("name", ["delta", "curve", 16, 18, 22])
def test_front_sign_regression(name, delta, curve, small_forms):
    f = {"delta": delta, "curve": curve}.get(name) or small_forms[name]
    hi = min(f.bound, 20_000) - 1
    s = voronoi.front_sign(f)
    assert _correlation(f, hi, s) > 0.9
    assert _correlation(f, hi, -s) < 0


def test_main_term_zero_terms(delta):
    assert voronoi.main_term(delta, 1000.5, 0) == 0.0


def test_main_term_bound(delta):
    with pytest.raises(UsageError):
        voronoi.main_term(delta, 10.5, delta.bound + 1)


@pytest.mark.parametrize("form", ["delta", "curve"])
def test_residual_at_ten_thousand(form, delta, curve):
    f = {"delta": delta, "curve": curve}[form]
    e = voronoi.evaluate(f, 10_000.5, 10_000)
    assert abs(e.residual) <= 0.5 * e.x**0.25
    assert e.residual == e.direct - e.main


def test_extended_precision_agrees(curve):
    d = voronoi.main_term(curve, 500.5, 500)
    e = voronoi.main_term(curve, 500.5, 500, precision="extended")
    assert d == pytest.approx(e, abs=1e-10)


def test_residual_decays_with_m(curve):
    xs = voronoi.half_integer_grid(100, 20_000, 100)
    full = voronoi.residual_scan(curve, xs, "x")
    short = voronoi.residual_scan(curve, xs, "x/100")
    assert statistics.median(abs(e.residual) for e in full) < statistics.median(abs(e.residual) for e in short)


def test_singleton_scan(delta):
    assert len(voronoi.residual_scan(delta, [2000.5])) == 1


@pytest.mark.parametrize("policy, want", [("x", 1000), ("x/100", 10), ("x*2", 2001), ("x^1.5", 31646),
                                          (7, 7), (lambda x: x // 3, 333)])
def test_truncation_policies(policy, want):
    assert voronoi.truncation(1000.5, policy) == want


@pytest.mark.parametrize("policy", ["y", "x^3", "x/", "2x"])
def test_bad_policy(policy):
    with pytest.raises(UsageError):
        voronoi.truncation(100, policy)


def test_half_integer_grid():
    xs = voronoi.half_integer_grid(1e3, 1e5, 100)
    assert len(xs) == 100 and xs[0] == 1000.5 and xs[-1] == 100000.5
    assert all(x % 1 == 0.5 for x in xs)


def test_csv_and_json(delta):
    evals = voronoi.residual_scan(delta, [100.5, 1000.5])
    buf = io.StringIO()
    voronoi.write_csv(evals, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,M,direct,main,residual,residual_over_x4"
    assert lines[1].startswith("100.5,100,")
    buf = io.StringIO()
    voronoi.write_json(evals, buf)
    report = json.loads(buf.getvalue())
    assert report["summary"]["count"] == 2 and len(report["evaluations"]) == 2


@pytest.mark.parametrize("xi, want", [(0.0, 1.0), (0.5, 4 / math.pi**2), (1.0, 0.0), (2.0, 0.0)])
def test_kernel_w_values(xi, want):
    assert voronoi.kernel_w(xi) == pytest.approx(want, abs=1e-15)


@given(st.floats(1e-6, 1e6) | st.floats(-1e6, -1e-6))
def test_kernel_w_bounds(xi):
    w = voronoi.kernel_w(xi)
    assert 0 <= w <= min(1.0, (math.pi * xi) ** -2) * (1 + 1e-12)
    assert w == voronoi.kernel_w(-xi)


@given(st.floats(1, 200), st.sampled_from([-1, 1]), st.floats(-1, 1))
def test_kernel_k_nonnegative(alpha, tau, u):
    assert voronoi.kernel_k(u, alpha, tau) >= 0


@pytest.mark.parametrize("alpha", [1, 2.5, 10, 37, 100])
@pytest.mark.parametrize("tau", [1, -1])
def test_kernel_mass(alpha, tau):
    mass = voronoi.kernel_mass(alpha, tau)
    assert 1 - (2 * math.pi * alpha) ** -2 <= mass <= 2


@pytest.mark.parametrize("kwargs", [dict(alpha=0.5), dict(tau=0), dict(beta=0), dict(t=0)])
def test_kernel_params_validation(kwargs):
    base = dict(alpha=10, tau=1, t=1, beta=1)
    with pytest.raises(UsageError):
        KernelParams(**{**base, **kwargs})


def test_r_beta_decays_off_diagonal():
    num, closed = voronoi.r_beta(KernelParams(10, 1, 1, 4))
    assert abs(num) <= 0.01
    assert num == pytest.approx(closed, abs=1e-8)


@pytest.mark.parametrize("alpha", [1, 3, 20, 50])
@pytest.mark.parametrize("t", [1, 7, 100])
@pytest.mark.parametrize("tau", [1, -1])
def test_r_beta_diagonal(alpha, t, tau):
    num, closed = voronoi.r_beta(KernelParams(alpha, tau, t, 1))
    assert num == pytest.approx(closed, abs=1e-8)
    w = voronoi.kernel_w
    assert closed == pytest.approx((w(2 * alpha) + tau / 2 * w(4 * alpha) + tau / 2)
                                   * math.cos(4 * math.pi * t - math.pi / 4), abs=1e-14)
    assert closed == pytest.approx(tau / (2 * math.sqrt(2)), abs=1 / alpha**2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(1, 3), st.sampled_from([5, 10, 20, 50]), st.integers(1, 100),
       st.sampled_from([-1, 1]))
def test_r_beta_grid(m, d, alpha, t, tau):
    num, closed = voronoi.r_beta(KernelParams(alpha, tau, t, m / d))
    assert abs(num - closed) <= 1e-8


@pytest.mark.parametrize("N, want", [(1, 1.0), (6, 2 / 3), (11, 120 / 121)])
def test_euler_factor(N, want):
    assert voronoi.euler_factor(N) == pytest.approx(want, abs=1e-15)


def test_j_tau_large_x(delta):
    # the two-sided inequality holds once X is large enough
    jp = voronoi.j_tau(delta, 1e5, 20, 1)
    jm = voronoi.j_tau(delta, 1e5, 20, -1)
    assert jp > BAR
    assert jm < -BAR


def test_j_tau_plus_at_ten_thousand(delta):
    assert voronoi.j_tau(delta, 1e4, 20, 1) > BAR


def test_j_tau_mesh_refinement(delta):
    coarse = voronoi.j_tau(delta, 1e4, 20, 1, sub=4)
    fine = voronoi.j_tau(delta, 1e4, 20, 1, sub=16)
    assert coarse == pytest.approx(fine, abs=1e-9)


def test_j_tau_errors(delta):
    with pytest.raises(UsageError):
        voronoi.j_tau(delta, 1e4, 200, 1)
    with pytest.raises(UsageError):
        voronoi.j_tau(delta, 1e6, 20, 1)
    with pytest.raises(UsageError):
        voronoi.j_tau(delta, 1e4, 20, 0)


def test_find_extrema_thresholds(delta, curve):
    from heckesigns.intervals import c_N

    ext = voronoi.find_extrema(delta, 1e4, 3 * c_N(1))
    assert ext.s_max >= 0.1 * 1e4**0.25 and ext.s_min <= -0.1 * 1e4**0.25
    assert 1e4 <= min(ext.x_max, ext.x_min)
    ext = voronoi.find_extrema(curve, 1e4, c_N(11) / 50)
    assert ext.s_max >= 0.1 * (11e4) ** 0.25 and ext.s_min <= -0.1 * (11e4) ** 0.25


def test_find_extrema_empty_window(delta):
    ext = voronoi.find_extrema(delta, 5000.5, 0)
    assert ext.x_max == ext.x_min == 5000.5
    assert ext.s_max == ext.s_min
    assert ext.s_max == pytest.approx(voronoi.partial_sum(delta, 5000), abs=1e-12)


def test_find_extrema_overflow(delta):
    with pytest.raises(UsageError):
        voronoi.find_extrema(delta, delta.bound - 10, 5)
