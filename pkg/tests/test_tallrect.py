import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ellipk

from minannuli import tallrect as tr
from minannuli.errors import DomainError, NoWitness


@given(st.floats(1.05, 6.0), st.floats(0.02, 0.98))
def test_incomplete_integrals_match_mpmath(d, frac):
    p = tr.TallRectParams(d)
    phi = frac * p.theta0
    F = tr.elliptic_F(phi, p.m)
    E = tr.elliptic_E(phi, p.m)
    assert F.value == pytest.approx(float(mpmath.re(mpmath.ellipf(phi, p.m))), rel=1e-12)
    assert E.value == pytest.approx(float(mpmath.re(mpmath.ellipe(phi, p.m))), rel=1e-12)
    assert F.error < 1e-12 and E.error < 1e-12


def test_integrals_below_parameter_one_and_oddness():
    for phi, m in ((0.7, 0.3), (1.2, 0.9)):
        assert tr.elliptic_F(phi, m).value == pytest.approx(float(mpmath.ellipf(phi, m)), rel=1e-12)
        assert tr.elliptic_E(-phi, m).value == pytest.approx(-float(mpmath.ellipe(phi, m)), rel=1e-12)
    with pytest.raises(DomainError):
        tr.elliptic_F(1.0, 4.0)  # radicand negative past asin(1/2)
    with pytest.raises(DomainError):
        tr.elliptic_F(math.pi / 2, 1.0)


@pytest.mark.parametrize("d", [1.1, 2.0, 5.0])
def test_height_exceeds_pi_and_matches_complete_integral(d):
    # lambda(0) = integral_0^(pi/2) d psi / sqrt(1 - sin^2 psi / d^2) = K(1/d^2)
    hv = tr.height(tr.TallRectParams(d))
    assert hv.value == pytest.approx(2 * ellipk(1 / d ** 2), rel=1e-13)
    assert hv.value > math.pi


def test_profile_endpoints_and_derivative():
    p = tr.TallRectParams(2.0)
    assert tr.lambda_profile(p, p.theta0).value == pytest.approx(0.0, abs=1e-14)
    th = 0.3
    s = 1e-6
    fd = (tr.lambda_profile(p, th + s).value - tr.lambda_profile(p, th - s).value) / (2 * s)
    assert fd == pytest.approx(tr.lambda_derivative(p, th), rel=1e-7)


@pytest.mark.parametrize("d,r,th", [(1.1, 0.5, 0.3), (2.0, 0.3, 0.2), (2.0, 0.7, 0.45), (5.0, 0.4, 0.1),
                                    (1.5, 0.6, 0.5)])
def test_closed_form_area_matches_surface_quadrature(d, r, th):
    p = tr.TallRectParams(d)
    closed = tr.area_sigma1(r, th, p).value
    assert closed == pytest.approx(tr.sigma1_area_by_quadrature(r, th, p), rel=1e-9)


def test_sector_area():
    assert tr.area_D1(math.exp(-1), math.pi / 4) == pytest.approx(4.0, rel=1e-15)
    assert tr.D1_area_by_quadrature(0.3, 0.4) == pytest.approx(tr.area_D1(0.3, 0.4), rel=1e-10)
    with pytest.raises(DomainError):
        tr.area_D1(1.5, 0.4)


@pytest.mark.parametrize("d,n", [(1.1, 2), (2.0, 4), (5.0, 10)])
def test_minimal_exponent(d, n):
    assert tr.min_exponent(d) == n
    assert tr.slope_at_zero(tr.TallRectParams(d, n)) > 0 > tr.slope_at_zero(tr.TallRectParams(d, n - 1))


@pytest.mark.parametrize("d", [1.1, 2.0, 5.0])
def test_ratio_tends_to_one(d):
    p = tr.TallRectParams(d, tr.min_exponent(d))
    f2 = tr.ratio_f(1e-2, p).value
    f3 = tr.ratio_f(1e-3, p).value
    assert abs((10 * f3 - f2) / 9 - 1) < 1e-3


def test_slope_formula_matches_finite_differences():
    p = tr.TallRectParams(2.0, 6)
    th = 1e-4
    fd = (tr.ratio_f(2 * th, p).value - tr.ratio_f(th, p).value) / th
    assert fd == pytest.approx(tr.slope_at_zero(p), rel=5e-3)


# frozen reference witnesses (d, n, theta*, f - 1)
WITNESSES = [(1.1, 2, 0.0923, 5.1e-3), (2.0, 4, 0.0039, 2.86e-5), (5.0, 10, 3.2e-5, 1.3e-8)]


@pytest.mark.parametrize("d,n,theta,excess", WITNESSES)
def test_certified_witness(d, n, theta, excess):
    w = tr.verify_not_minimizing(d)
    assert w.certified and w.n == n
    assert w.theta_star == pytest.approx(theta, rel=0.02)
    assert w.f_value - 1 == pytest.approx(excess, rel=0.02)
    assert w.error_bound < 1e-13
    assert w.to_dict()["margin"] > 0


def test_no_witness_when_search_is_capped():
    with pytest.raises(NoWitness):
        tr.verify_not_minimizing(5.0, n_max=5)


def test_parameter_validation():
    with pytest.raises(DomainError):
        tr.TallRectParams(0.9)
    with pytest.raises(DomainError):
        tr.ratio_f(0.6, tr.TallRectParams(2.0))
    with pytest.raises(DomainError):
        tr.area_sigma1(0.5, 0.7, tr.TallRectParams(2.0))


def test_mesh_halves_share_the_seam():
    p = tr.TallRectParams(2.0)
    v, f = tr.mesh(p, n_r=6, n_theta=10)
    n_rows = 2 * 10 - 1
    assert len(v) == 6 * n_rows
    grid = v.reshape(6, n_rows, 3)
    seam = grid[:, 9]
    np.testing.assert_allclose(seam[:, 2], 0.0, atol=1e-14)
    # mirrored rows: same (x, y), opposite heights
    np.testing.assert_allclose(grid[:, :9, :2], grid[:, 10:, :2][:, ::-1], atol=1e-15)
    np.testing.assert_allclose(grid[:, :9, 2], -grid[:, 10:, 2][:, ::-1], atol=1e-15)
    seam_ids = set(range(9, 6 * n_rows, n_rows))
    above = {i for face in f for i in face if i % n_rows < 9}
    below = {i for face in f for i in face if i % n_rows > 9}
    faces_on_seam = [face for face in f if seam_ids & set(face)]
    assert above and below
    assert any(set(face) & above for face in faces_on_seam) and any(set(face) & below for face in faces_on_seam)
    assert f.max() < len(v)
