import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minannuli.errors import DomainError
from minannuli.flux import (EndTrace, catenoid_traces, center, conservation_residuals,
                            dilated_catenoid_bottom_trace, finite_radius_vertical_flux, flux_dilation,
                            flux_dilation_cos, flux_report, flux_rotational, flux_vertical, membership, orientation_check,
                            spectral_derivative)
from minannuli.catenoid import half_height_from_kappa


@pytest.mark.parametrize("kappa", [0.3, 1.0, 4.0])
def test_catenoid_fluxes(kappa):
    top, bot = catenoid_traces(kappa, half_height_from_kappa(kappa), 64)
    assert flux_vertical(top) == pytest.approx(2 * math.pi / kappa, abs=1e-10)
    # signed convention: the bottom flux is also +2 pi / kappa while the raw integrals cancel
    assert flux_vertical(bot) == pytest.approx(2 * math.pi / kappa, abs=1e-10)
    assert abs(flux_rotational(top)) < 1e-12
    assert np.max(np.abs(flux_report(bot).dilation)) < 1e-12
    assert max(conservation_residuals(top, bot).values()) < 1e-12


def test_finite_radius_flux_is_invariant():
    fr = finite_radius_vertical_flux(0.8, np.linspace(0.7, 1.0, 7))
    np.testing.assert_allclose(fr, 2 * math.pi / 0.8, rtol=1e-12)


def test_spectral_derivative():
    th = np.arange(32) * 2 * np.pi / 32
    np.testing.assert_allclose(spectral_derivative(np.sin(3 * th)), 3 * np.cos(3 * th), atol=1e-12)


trace_coef = st.lists(st.floats(-1.0, 1.0), min_size=6, max_size=6)


def _trace(end, c, n=64):
    th = np.arange(n) * 2 * np.pi / n
    u = c[0] * np.cos(th) + c[1] * np.sin(2 * th)
    ur = 1.5 + c[2] * np.cos(th) + c[3] * np.sin(th) + c[4] * np.cos(3 * th) + c[5] * np.sin(2 * th)
    return EndTrace.from_samples(end, u, ur)


@given(trace_coef, st.floats(-3.0, 3.0))
def test_fluxes_are_rotation_invariant(c, zeta):
    tr = _trace("top", c)
    rt = tr.rotated(zeta)
    assert flux_vertical(rt) == pytest.approx(flux_vertical(tr), abs=1e-12)
    assert flux_rotational(rt) == pytest.approx(flux_rotational(tr), abs=1e-12)
    # the dilational flux is a first harmonic in the direction a, so it rotates with the trace
    a = 0.4
    assert flux_dilation(rt, a + zeta) == pytest.approx(flux_dilation(tr, a), abs=1e-12)
    assert flux_dilation_cos(rt, a + zeta) == pytest.approx(flux_dilation_cos(tr, a), abs=1e-12)


@given(trace_coef)
def test_mirrored_traces_conserve(c):
    top = _trace("top", c)
    bot = EndTrace.from_samples("bottom", top.u, -top.u_r)
    assert max(conservation_residuals(top, bot).values()) < 1e-12


def test_trace_validation():
    with pytest.raises(DomainError):
        EndTrace("side", np.zeros(4), np.zeros(4), np.zeros(4))
    with pytest.raises(DomainError):
        EndTrace("top", np.zeros(4), np.zeros(3), np.zeros(4))
    top, bot = catenoid_traces(1.0, 0.5, 8)
    with pytest.raises(DomainError):
        conservation_residuals(bot, top)
    tr = _trace("top", [0.1] * 6)
    assert tr.theta_consistency() < 1e-12


@pytest.mark.parametrize("z0", [0j, 0.3, 0.5 * cmath.exp(1j * math.pi / 3), -0.7 + 0.1j])
def test_center_of_dilated_catenoid_is_its_axis(z0):
    rep = center(dilated_catenoid_bottom_trace(1.0, z0, 128), 0.0)
    assert abs(rep.center.z - z0) < 1e-12
    assert rep.f0 < 0 and rep.G0 == pytest.approx(rep.f0 - 1 / rep.f0)


def test_dilated_trace_has_the_centered_flux():
    # flux is invariant under isometries, so the dilated catenoid keeps -2 pi / kappa as raw integral
    tr = dilated_catenoid_bottom_trace(0.9, 0.4 - 0.3j, 256)
    assert 2 * math.pi * np.mean(tr.u_r) == pytest.approx(-2 * math.pi / 0.9, rel=1e-12)


@given(st.floats(-3.0, 3.0), st.floats(0.0, 0.6), st.floats(-3.0, 3.0))
def test_center_is_rotation_equivariant(zeta, rad, arg):
    base = dilated_catenoid_bottom_trace(1.2, rad * cmath.exp(1j * arg), 64)
    th = base.theta
    v_r = 0.05 * np.cos(2 * th) + 0.02 * np.sin(th)
    c0 = center(base, v_r).center.z
    v_rot = EndTrace.from_samples("bottom", v_r, v_r).rotated(zeta).u
    c1 = center(base.rotated(zeta), v_rot).center.z
    assert abs(c1 - cmath.exp(1j * zeta) * c0) < 1e-10


@given(st.lists(st.floats(-3.0, 3.0), min_size=5, max_size=5), st.floats(1e-3, 5.0))
def test_center_stays_in_the_disk(c, scale):
    th = np.arange(64) * 2 * np.pi / 64
    diff = -scale * np.exp(c[0] * np.cos(th) + c[1] * np.sin(th) + c[2] * np.cos(2 * th)
                           + c[3] * np.sin(3 * th) + c[4] * np.cos(5 * th))
    assert membership(diff, 0.0)
    assert abs(center(EndTrace.from_samples("bottom", np.zeros(64), diff), 0.0).center.z) < 1.0


def test_center_requires_membership():
    top, bot = catenoid_traces(1.0, 0.5, 16)
    with pytest.raises(DomainError):
        center(bot, -2.0)
    with pytest.raises(DomainError):
        center(top, 0.0)


def test_orientation_check_flags_only_inconsistent_traces():
    top, bot = catenoid_traces(1.3, half_height_from_kappa(1.3), 64)
    ok = orientation_check(top, bot)
    assert not ok["ambiguous"] and ok["kept"] < 1e-12 and ok["flipped"] > 1.0
    lopsided = bot.scaled_normal(0.5)
    assert orientation_check(top, lopsided)["ambiguous"]
