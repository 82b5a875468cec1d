import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from bstunnel.analytic import (
    AdjustableMoments,
    ProbabilityEstimate,
    RandomMoments,
    adjustable_moments,
    p_adjustable_gamma,
    p_adjustable_gauss,
    p_random_channel_exact,
    p_random_exact,
    p_random_gamma,
    p_random_gauss_delta,
    random_moments,
)
from bstunnel.fading import PhasePolicy, Regime
from bstunnel.geometry import TunnelGeometry, build_layout
from bstunnel.montecarlo import McConfig, estimate_p, estimate_p_power_sum

from .oracles import mp


def with_weights(layout, c):
    c = np.asarray(c, dtype=np.float64)
    return replace(layout, n_tags=c.size, c=c, w=1.0 / c**2)


def exact_oracle(layout):
    """Product-of-Laplace-transforms integral via scipy quad and mpmath's E1."""
    w = np.asarray(layout.w)

    def kernel(z):
        return float(z * mp.exp(z) * mp.e1(z))

    def f(u):
        if u == 0:
            return 1.0
        z = 1.0 / (layout.c_const * u * w)
        return math.exp(-u) * math.prod(kernel(zi) for zi in z)

    val, _ = integrate.quad(f, 0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=400)
    return 1.0 - val


# --- moments ---------------------------------------------------------------


def test_empty_layout_moments(geom):
    lay = build_layout(geom, 0, 10.0)
    assert adjustable_moments(lay, 0.3) == AdjustableMoments(0.0, 0.0)
    assert random_moments(lay) == RandomMoments(0.0, 0.0)


def test_single_unit_tag_moments(unit_layout):
    m0 = adjustable_moments(unit_layout, 0.0)
    assert m0.mu_G == pytest.approx(math.pi / 4, abs=1e-15)
    assert m0.sigma2_G == pytest.approx(1 - math.pi**2 / 16, abs=1e-15)
    assert m0.sigma2_G == pytest.approx(0.38310, abs=1e-4)
    m5 = adjustable_moments(unit_layout, 0.5)
    assert m5.mu_G == pytest.approx(0.69310, abs=1e-4)
    assert m5.sigma2_G == pytest.approx(0.51962, abs=1e-4)


def test_variance_ratio_without_residuals(geom):
    lay = build_layout(geom, 17, 8.0)
    m = adjustable_moments(lay, 0.0)
    assert m.sigma2_G / np.sum(1 / lay.c**2) == pytest.approx(1 - math.pi**2 / 16, rel=1e-13)


@pytest.mark.parametrize("n", [1, 5, 40])
def test_residuals_shrink_mean_and_grow_variance(geom, n):
    lay = build_layout(geom, n, 20.0)
    ms = [adjustable_moments(lay, s) for s in (0.0, 0.1, 0.3, 0.5, 1.0, 2.0)]
    assert all(a.mu_G > b.mu_G for a, b in zip(ms, ms[1:]))
    assert all(a.sigma2_G < b.sigma2_G for a, b in zip(ms, ms[1:]))


def test_random_moment_examples(unit_layout):
    assert random_moments(unit_layout) == RandomMoments(1.0, 3.0)
    two = with_weights(unit_layout, [math.sqrt(2), math.sqrt(2)])
    m = random_moments(two)
    assert m.mu_T == pytest.approx(1.0)
    assert m.sigma2_T == pytest.approx(1.5)


@given(n=st.integers(1, 80), l1=st.floats(0, 40))
@settings(max_examples=50, deadline=None)
def test_random_moment_bounds(n, l1):
    m = random_moments(build_layout(TunnelGeometry(), n, l1))
    assert m.mu_T > 0 and m.sigma2_T > 0
    assert m.sigma2_T <= 3 * m.mu_T**2 * (1 + 1e-12)


def test_negative_sigma_rejected(unit_layout):
    with pytest.raises(ValueError):
        adjustable_moments(unit_layout, -0.01)


# --- trivial cases ---------------------------------------------------------


def test_zero_constant_gives_zero(geom):
    lay = build_layout(geom, 10, 20.0)
    am, rm = adjustable_moments(lay, 0.1), random_moments(lay)
    for est in (
        p_adjustable_gauss(am, 0.0),
        p_adjustable_gamma(am, 0.0),
        p_random_gauss_delta(rm, 0.0),
        p_random_gamma(rm, 0.0),
        p_random_exact(build_layout(geom, 10, 20.0, eta=0.0)),
    ):
        assert est.value == 0.0


def test_no_tags_gives_zero(geom):
    lay = build_layout(geom, 0, 20.0)
    am, rm = adjustable_moments(lay, 0.1), random_moments(lay)
    assert p_adjustable_gauss(am, lay.c_const).value == 0.0
    assert p_adjustable_gamma(am, lay.c_const).value == 0.0
    assert p_random_gauss_delta(rm, lay.c_const).value == 0.0
    assert p_random_gamma(rm, lay.c_const).value == 0.0
    assert p_random_exact(lay).value == 0.0


def test_degenerate_gamma_match_rejected():
    with pytest.raises(ValueError):
        p_adjustable_gamma(AdjustableMoments(1.0, 0.0), 1.0)


def test_estimate_carries_method_and_range():
    with pytest.raises(ValueError):
        ProbabilityEstimate(1.2, "gamma")
    with pytest.raises(ValueError):
        ProbabilityEstimate(0.2, "bogus")


# --- closed-form examples --------------------------------------------------


def test_delta_method_example():
    assert p_random_gauss_delta(RandomMoments(1.0, 3.0), 1.0).value == pytest.approx(0.125, abs=1e-15)


def test_delta_method_clamps_at_zero():
    est = p_random_gauss_delta(RandomMoments(0.01, 30.0), 1.0)
    assert est.value == 0.0 and est.clamped


def test_random_gamma_example_matches_quadrature():
    # k = 1/3, theta = 3, c = 1: 1 - int e^{-u} (1 + 3u)^{-1/3} du
    oracle = 1 - integrate.quad(lambda u: math.exp(-u) * (1 + 3 * u) ** (-1 / 3), 0, np.inf, epsabs=1e-13)[0]
    assert oracle == pytest.approx(0.3033919036, abs=1e-10)
    assert p_random_gamma(RandomMoments(1.0, 3.0), 1.0).value == pytest.approx(oracle, abs=1e-10)


@pytest.mark.parametrize("s,k", [(0.01, 0.2), (0.5, 0.9), (3.0, 1.0), (20.0, 2.5), (1e3, 0.05)])
def test_random_gamma_against_quadrature(s, k):
    # mean k theta and variance k theta^2 with theta = s at c = 1
    m = RandomMoments(k * s, k * s * s)
    oracle = 1 - integrate.quad(lambda u: math.exp(-u) * (1 + s * u) ** (-k), 0, np.inf, epsabs=1e-13)[0]
    assert p_random_gamma(m, 1.0).value == pytest.approx(oracle, abs=1e-9)


def test_adjustable_gauss_formula(unit_layout):
    m = AdjustableMoments(0.7, 0.4)
    c = 2.5
    expected = 1 - math.exp(-c * 0.49 / (1 + c * 0.4)) / math.sqrt(1 + c * 0.4)
    assert p_adjustable_gauss(m, c).value == pytest.approx(expected, rel=1e-14)


def test_adjustable_gamma_formula():
    m = AdjustableMoments(0.7, 0.4)
    ez = 0.49 + 0.4
    vz = 2 * 0.16 + 4 * 0.4 * 0.49
    k, theta = ez**2 / vz, vz / ez
    assert p_adjustable_gamma(m, 2.5).value == pytest.approx(1 - (1 + 2.5 * theta) ** (-k), rel=1e-14)


# --- exact random-phase integral -------------------------------------------


@pytest.mark.parametrize("n,l1", [(1, 20.0), (2, 5.0), (5, 35.0), (20, 20.0), (80, 5.0)])
def test_exact_matches_scipy_oracle(geom, n, l1):
    lay = build_layout(geom, n, l1)
    est = p_random_exact(lay)
    assert est.stderr is None and est.method == "exact"
    assert est.value == pytest.approx(exact_oracle(lay), abs=1e-8)


def test_exact_single_tag_against_mc(geom):
    lay = build_layout(geom, 1, 20.0)
    mc = estimate_p_power_sum(lay, McConfig(runs=1_000_000, seed=21))
    assert abs(p_random_exact(lay).value - mc.value) <= 3 * mc.stderr


def test_channel_exact_against_full_mc(geom):
    lay = build_layout(geom, 40, 20.0)
    mc = estimate_p(lay, PhasePolicy(Regime.RANDOM), McConfig(runs=400_000, seed=22))
    assert abs(p_random_channel_exact(lay).value - mc.value) <= 3 * mc.stderr


def test_channel_exact_single_tag_closed_form(geom):
    # one tag: |A_r|^2 = w X Y, so P = 1 - E[1/(1 + s X)] = 1 - e^{1/s} E1(1/s) / s with s = c w
    lay = build_layout(geom, 1, 13.0)
    s = lay.c_const * lay.w[0]
    closed = 1 - math.exp(1 / s) * special.exp1(1 / s) / s
    assert p_random_channel_exact(lay).value == pytest.approx(closed, abs=1e-9)
    assert p_random_channel_exact(lay).value > p_random_exact(lay).value


# --- properties ------------------------------------------------------------


@given(
    n=st.integers(0, 80),
    l1=st.floats(0, 40),
    length=st.floats(10, 60),
    eta=st.floats(0, 1),
    sigma=st.floats(0, 2),
)
@settings(max_examples=60, deadline=None)
def test_all_estimators_in_unit_interval(n, l1, length, eta, sigma):
    geom = TunnelGeometry(L=length)
    lay = build_layout(geom, n, min(l1, length), eta=eta)
    am, rm = adjustable_moments(lay, sigma), random_moments(lay)
    values = [
        p_adjustable_gauss(am, lay.c_const).value,
        p_adjustable_gamma(am, lay.c_const).value,
        p_random_gauss_delta(rm, lay.c_const).value,
        p_random_gamma(rm, lay.c_const).value,
        p_random_exact(lay).value,
    ]
    assert all(0.0 <= v <= 1.0 for v in values)


@pytest.mark.parametrize("n,l1", [(1, 20.0), (10, 5.0), (40, 20.0)])
def test_nondecreasing_in_eta(geom, n, l1):
    etas = np.linspace(0.0, 1.0, 21)
    rows = []
    for eta in etas:
        lay = build_layout(geom, n, l1, eta=float(eta))
        am, rm = adjustable_moments(lay, 0.3), random_moments(lay)
        rows.append(
            [
                p_adjustable_gauss(am, lay.c_const).value,
                p_adjustable_gamma(am, lay.c_const).value,
                p_random_gauss_delta(rm, lay.c_const).value,
                p_random_gamma(rm, lay.c_const).value,
                p_random_exact(lay).value,
            ]
        )
    assert np.all(np.diff(np.array(rows), axis=0) >= -1e-12)


@pytest.mark.parametrize("sigma", [0.1, 0.5])
@pytest.mark.parametrize("l1", [5.0, 10.0, 20.0])
def test_adjustable_gamma_grows_when_a_tag_is_added(geom, sigma, l1):
    # keep the N-tag layout and append each site of the (N+1)-tag grid in turn
    for n in range(1, 80):
        lay = build_layout(geom, n, l1)
        p = p_adjustable_gamma(adjustable_moments(lay, sigma), lay.c_const).value
        for extra in build_layout(geom, n + 1, l1).c:
            more = with_weights(lay, np.append(lay.c, extra))
            assert p_adjustable_gamma(adjustable_moments(more, sigma), lay.c_const).value >= p


@pytest.mark.parametrize("l1", [5.0, 10.0, 20.0])
def test_respaced_grid_is_monotone_beyond_four_tags(geom, l1):
    # every tag moves when N changes; a tag landing under the receiver at odd N
    # makes small-N curves dip for l1 in {10, 20}
    p = []
    for n in range(5, 81):
        lay = build_layout(geom, n, l1)
        p.append(p_adjustable_gamma(adjustable_moments(lay, 0.1), lay.c_const).value)
    assert np.all(np.diff(p) >= 0)


@given(c=st.lists(st.floats(1.0, 1e4), min_size=1, max_size=30), extra=st.floats(1.0, 1e4))
@settings(max_examples=60, deadline=None)
def test_adding_a_tag_never_hurts(c, extra):
    template = build_layout(TunnelGeometry(), 1, 20.0)
    base = with_weights(template, c)
    more = with_weights(template, c + [extra])
    for sigma in (0.0, 0.5):
        a = p_adjustable_gamma(adjustable_moments(base, sigma), 5.0).value
        b = p_adjustable_gamma(adjustable_moments(more, sigma), 5.0).value
        assert b >= a - 1e-15


def test_random_approximations_close_to_exact_midtunnel():
    for length in (20.0, 40.0):
        geom = TunnelGeometry(L=length)
        for n in (1, 5, 10, 20, 40, 60, 80):
            lay = build_layout(geom, n, length / 2)
            exact = p_random_exact(lay).value
            rm = random_moments(lay)
            assert abs(p_random_gamma(rm, lay.c_const).value - exact) <= 0.02
            assert abs(p_random_gauss_delta(rm, lay.c_const).value - exact) <= 0.03
