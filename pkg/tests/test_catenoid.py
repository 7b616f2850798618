import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minannuli import catenoid as cat
from minannuli.errors import DomainError


def h_oracle(kappa):
    """Independent half-height: integral of dr / (r sqrt(kappa^2 - (1-r^2)^2 / (4 r^2))), tanh-sinh at 40 digits."""
    with mpmath.workdps(40):
        k = mpmath.mpf(kappa)
        rmin = mpmath.sqrt(1 + k * k) - k
        f = lambda r: 1 / (r * mpmath.sqrt(k * k - (1 - r * r) ** 2 / (4 * r * r)))
        # r = rmin + s^2 tames the inverse square root; rounding can leave a ~1e-20 imaginary part
        g = lambda s: 2 * s * f(rmin + s * s)
        return float(mpmath.re(mpmath.quad(g, [0, mpmath.sqrt(1 - rmin)])))


@pytest.mark.parametrize("kappa", [0.3, 0.75, 1.0, 3.0])
def test_neck_radius_closed_form(kappa):
    assert cat.neck_radius(kappa) == pytest.approx(math.sqrt(1 + kappa ** 2) - kappa, rel=1e-14)
    prof = cat.profile(kappa, 513)
    assert abs(prof.r[256] - cat.neck_radius(kappa)) < 1e-8


def test_neck_radius_three_quarters_is_exactly_half():
    assert cat.neck_radius(0.75) == 0.5
    assert cat.profile(0.75, 513).r[256] == 0.5


@pytest.mark.parametrize("kappa", [0.05, 0.3, 1.0, 3.0, 20.0])
def test_half_height_matches_mpmath_oracle(kappa):
    assert cat.half_height_from_kappa(kappa) == pytest.approx(h_oracle(kappa), rel=1e-11)


def test_half_height_is_decreasing_with_limits():
    ks = np.geomspace(1e-3, 1e3, 25)
    hs = [cat.half_height_from_kappa(k) for k in ks]
    assert all(a > b for a, b in zip(hs, hs[1:]))
    assert hs[0] < math.pi / 2 and hs[0] > 1.5
    assert 0 < hs[-1] < 1e-2


@given(st.floats(0.01, 1.55))
def test_kappa_h_round_trip(h):
    k = cat.kappa_from_half_height(h)
    assert cat.half_height_from_kappa(k) == pytest.approx(h, abs=1e-10)


@pytest.mark.parametrize("h", [0.0, math.pi / 2, 2.0, -0.1])
def test_half_height_outside_range_is_rejected(h):
    with pytest.raises(DomainError):
        cat.kappa_from_half_height(h)


def test_catenoid_params_needs_exactly_one():
    with pytest.raises(DomainError):
        cat.catenoid_params()
    with pytest.raises(DomainError):
        cat.catenoid_params(kappa=1.0, h=0.5)
    p = cat.catenoid_params(h=0.8)
    assert cat.half_height_from_kappa(p.kappa) == pytest.approx(0.8)


@pytest.mark.parametrize("kappa", [0.3, 1.0])
def test_first_integral_residual_is_second_order(kappa):
    r1 = np.max(np.abs(cat.profile(kappa, 512).first_integral_residual()))
    r2 = np.max(np.abs(cat.profile(kappa, 1024).first_integral_residual()))
    assert r1 < 1e-4
    assert r1 / r2 >= 3.5


def test_profile_is_even_and_hits_boundary():
    prof = cat.profile(1.2, 201)
    np.testing.assert_allclose(prof.r, prof.r[::-1], atol=1e-14)
    assert prof.r[0] == prof.r[-1] == 1.0
    assert np.all(prof.r >= prof.r_min - 1e-15)
    assert prof.t[-1] == pytest.approx(cat.half_height_from_kappa(1.2), abs=1e-12)


def test_exact_derivative_agrees_with_differences():
    prof = cat.profile(0.9, 2001)
    fd = np.gradient(prof.r, prof.dt)
    np.testing.assert_allclose(prof.dr[5:-5], fd[5:-5], atol=1e-4)


@pytest.mark.parametrize("kappa", [0.4, 1.0, 2.5])
def test_end_graph_inverts_the_profile(kappa):
    prof = cat.profile(kappa, 257)
    upper = prof.t > 0
    t = cat.graph_height(kappa, prof.r[upper])
    np.testing.assert_allclose(t, prof.t[upper], atol=1e-11)
    assert cat.graph_height(kappa, 1.0) == pytest.approx(prof.h, abs=1e-12)
    assert cat.graph_height(kappa, 1.0, end=-1) == pytest.approx(-prof.h, abs=1e-12)


@pytest.mark.parametrize("kappa", [0.4, 1.0, 2.5])
def test_end_slope_at_boundary_is_inverse_kappa(kappa):
    assert cat.graph_slope(kappa, 1.0) == pytest.approx(1 / kappa, rel=1e-14)
    assert cat.graph_normal_trace(kappa) == pytest.approx(1 / kappa)
    rho = np.linspace(0.9, 0.99, 5)
    s = 1e-6
    fd = (cat.graph_height(kappa, rho + s) - cat.graph_height(kappa, rho - s)) / (2 * s)
    np.testing.assert_allclose(fd, cat.graph_slope(kappa, rho), rtol=1e-6)


def test_profile_rejects_bad_input():
    with pytest.raises(DomainError):
        cat.profile(-1.0)
    with pytest.raises(DomainError):
        cat.profile(1.0, 8)
