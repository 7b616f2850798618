import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minannuli.catenoid import graph_height, kappa_from_half_height, neck_radius
from minannuli.curves import BoundaryCurve
from minannuli.errors import DomainError, NonConvergence
from minannuli.graphsolver import (NewtonOptions, PolarGrid, harmonic_init, normal_trace, ring_fluxes,
                                   solve_minimal_graph)


def test_grid_layout():
    g = PolarGrid(4, 8)
    assert g.n_nodes == 1 + 4 * 8
    assert g.node(0, 3) == 0 and g.node(1, 8) == g.node(1, 0) == 1
    assert set(g.dirichlet) == set(g.ring_nodes(4))
    # the triangle areas tile the polygonal disk twice over, then the weights halve them
    assert np.sum(g.w_area) == pytest.approx(0.5 * 8 * math.sin(2 * math.pi / 8))
    a = PolarGrid(4, 8, r_inner=0.5)
    assert a.n_nodes == 5 * 8 and len(a.dirichlet) == 16


def test_grid_validation():
    with pytest.raises(DomainError):
        PolarGrid(2, 8)
    with pytest.raises(DomainError):
        PolarGrid(4, 8, r_inner=1.0)


def test_constant_data_is_solved_at_initialization():
    sol = solve_minimal_graph(0.37, PolarGrid(16, 16))
    assert sol.iterations == 0
    np.testing.assert_allclose(sol.u, 0.37)


def test_linear_response_constant_is_stable():
    eps = 1e-3
    C = []
    for n in (32, 64):
        grid = PolarGrid(n, n)
        sol = solve_minimal_graph(BoundaryCurve({1: (eps, 0.0)}), grid, NewtonOptions(tol=1e-18))
        r, th = grid.polar()
        C.append(np.max(np.abs(sol.u - eps * r * np.cos(th))) / eps ** 2)
    assert C[0] == pytest.approx(1.351e-5, rel=0.02)  # frozen from the reference run
    assert abs(C[1] - C[0]) / C[1] < 0.05


def test_nonlinear_correction_is_cubic():
    # the quadratic term vanishes by oddness of cos(theta) data, so the defect scales like eps^3
    grid = PolarGrid(24, 24)
    r, th = grid.polar()
    d = []
    for eps in (0.02, 0.04):
        sol = solve_minimal_graph(BoundaryCurve({1: (eps, 0.0)}), grid, NewtonOptions(tol=1e-16))
        d.append(np.max(np.abs(sol.u - eps * r * np.cos(th))))
    assert d[1] / d[0] == pytest.approx(8.0, rel=0.05)


def test_disk_flux_vanishes():
    data = BoundaryCurve({0: (0.3, 0.0), 1: (1.0, 0.2), 2: (0.5, 0.0)})
    sol = solve_minimal_graph(data, PolarGrid(48, 48))
    fl = ring_fluxes(sol)
    assert np.max(np.abs(fl)) < 1e-12
    # the stencil trace integral is only second-order accurate
    assert abs(2 * math.pi * np.mean(sol.normal_trace)) < 2e-3


def test_catenoid_end_is_reproduced_on_an_annulus():
    kappa = 1.0
    r_in = 0.5 * (1.0 + neck_radius(kappa))
    grid = PolarGrid(64, 64, r_inner=r_in)
    h_in = float(graph_height(kappa, r_in))
    h = float(graph_height(kappa, 1.0))
    sol = solve_minimal_graph(h, grid, inner=h_in)
    r, _ = grid.polar()
    assert np.max(np.abs(sol.u - graph_height(kappa, r))) < 1e-4
    assert np.max(np.abs(sol.normal_trace - 1.0 / kappa)) < 1e-3
    fl = ring_fluxes(sol)
    assert np.ptp(fl) < 1e-10
    assert fl[0] == pytest.approx(2 * math.pi / kappa, rel=2e-3)
    assert kappa_from_half_height(h) == pytest.approx(kappa, rel=1e-9)


@settings(max_examples=8)
@given(st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
def test_maximum_principle(c):
    data = BoundaryCurve({0: (c[0], 0.0), 1: (c[1], c[2]), 3: (c[3], 0.0)})
    sol = solve_minimal_graph(data, PolarGrid(12, 16))
    b = sol.boundary_trace
    assert sol.u.min() >= b.min() - 1e-9 and sol.u.max() <= b.max() + 1e-9


def test_initializations_agree():
    data = BoundaryCurve({2: (0.4, 0.1)})
    grid = PolarGrid(12, 16)
    a = solve_minimal_graph(data, grid)
    b = solve_minimal_graph(data, grid, init="zero")
    c = solve_minimal_graph(data, grid, init=harmonic_init(data, grid) * 0.5)
    np.testing.assert_allclose(a.u, b.u, atol=1e-9)
    np.testing.assert_allclose(a.u, c.u, atol=1e-9)
    with pytest.raises(DomainError):
        solve_minimal_graph(data, grid, init="bogus")


def test_boundary_data_forms():
    grid = PolarGrid(8, 16)
    th = grid.theta
    a = solve_minimal_graph(lambda t: 0.2 * np.sin(t), grid)
    b = solve_minimal_graph(0.2 * np.sin(th), grid)
    np.testing.assert_allclose(a.u, b.u, atol=1e-12)
    np.testing.assert_allclose(normal_trace(a), a.normal_trace)


def test_nonconvergence_carries_history():
    with pytest.raises(NonConvergence) as exc:
        solve_minimal_graph(BoundaryCurve({1: (2.0, 0.0)}), PolarGrid(8, 16), NewtonOptions(max_iter=1, tol=1e-14))
    assert len(exc.value.history) >= 1


def test_summary_and_rows():
    sol = solve_minimal_graph(BoundaryCurve({1: (0.1, 0.0)}), PolarGrid(8, 16))
    s = sol.summary()
    assert s["iterations"] == sol.iterations and abs(s["vertical_flux"]) < 1e-2
    assert sol.rows().shape == (sol.grid.n_nodes, 3)
