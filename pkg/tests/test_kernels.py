import os
import subprocess
import sys

import numpy as np
import pytest

from minannuli import _kernels, _pykernels
from minannuli.annulus import build_chart
from minannuli.graphsolver import PolarGrid

ck = pytest.importorskip("minannuli._ckernels")


def _random_graph_case(rng):
    grid = PolarGrid(6, 12)
    u = rng.normal(scale=0.5, size=grid.n_nodes)
    return grid, u


def test_backend_selected_at_import():
    forced = os.environ.get("MINANNULI_PURE_PYTHON") == "1"
    assert _kernels.BACKEND == ("python" if forced else "cython")


def test_pure_python_fallback_is_selectable():
    env = dict(os.environ, MINANNULI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import minannuli; print(minannuli.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("x", [-50.0, -1.0, 0.0, 0.3, 7.0])
def test_sturm_count_parity_and_oracle(rng, x):
    diag = rng.normal(size=40)
    off = rng.normal(size=39)
    full = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    expected = int(np.sum(np.linalg.eigvalsh(full) < x))
    assert _pykernels.sturm_count(diag, off, x) == expected
    assert ck.sturm_count(diag, off, x) == expected


def test_graph_assemble_parity(rng):
    grid, u = _random_graph_case(rng)
    args = (u, grid.tri, grid.grads, grid.w_area, grid.F_centroid)
    e0, r0, h0 = _pykernels.graph_assemble(*args)
    e1, r1, h1 = ck.graph_assemble(*args)
    assert e1 == pytest.approx(e0, rel=1e-13)
    np.testing.assert_allclose(r1, r0, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(h1, h0, rtol=1e-12, atol=1e-14)


def test_graph_assemble_derivatives_match_finite_differences(rng):
    grid, u = _random_graph_case(rng)
    E = lambda v: _pykernels.graph_assemble(v, grid.tri, grid.grads, grid.w_area, grid.F_centroid)
    _, res, hv = E(u)
    H = grid.matrix(hv).toarray()
    d = rng.normal(size=u.size)
    s = 1e-6
    fd_e = (E(u + s * d)[0] - E(u - s * d)[0]) / (2 * s)
    assert fd_e == pytest.approx(res @ d, rel=1e-7)
    fd_g = (E(u + s * d)[1] - E(u - s * d)[1]) / (2 * s)
    np.testing.assert_allclose(fd_g, H @ d, rtol=1e-6, atol=1e-8)


@pytest.fixture(scope="module")
def small_chart():
    return build_chart(h=0.8, n_t=49, n_theta=16)


def test_area_assemble_parity(small_chart, rng):
    ch = small_chart
    u = 1e-2 * rng.normal(size=ch.n_nodes)
    a0, g0, h0 = _pykernels.area_assemble(ch.X0, ch.nvec, u, ch.tri, ch.weight, True)
    a1, g1, h1 = ck.area_assemble(ch.X0, ch.nvec, u, ch.tri, ch.weight, True)
    assert a1 == pytest.approx(a0, rel=1e-13)
    np.testing.assert_allclose(g1, g0, rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(h1, h0, rtol=1e-10, atol=1e-12)
    _, _, none = ck.area_assemble(ch.X0, ch.nvec, u, ch.tri, ch.weight, False)
    assert none is None


def test_area_assemble_derivatives_match_finite_differences(small_chart, rng):
    ch = small_chart
    u = 1e-2 * rng.normal(size=ch.n_nodes)
    A = lambda v: _pykernels.area_assemble(ch.X0, ch.nvec, v, ch.tri, ch.weight, True)
    _, g, hv = A(u)
    rows = np.repeat(ch.tri, 3, axis=1).ravel()
    cols = np.tile(ch.tri, (1, 3)).ravel()
    H = np.zeros((ch.n_nodes, ch.n_nodes))
    np.add.at(H, (rows, cols), hv)
    d = rng.normal(size=u.size)
    s = 1e-6
    fd_a = (A(u + s * d)[0] - A(u - s * d)[0]) / (2 * s)
    assert fd_a == pytest.approx(g @ d, rel=1e-7)
    fd_g = (A(u + s * d)[1] - A(u - s * d)[1]) / (2 * s)
    np.testing.assert_allclose(fd_g, H @ d, rtol=1e-5, atol=1e-8)
    np.testing.assert_allclose(H, H.T, atol=1e-10 * np.abs(H).max())
