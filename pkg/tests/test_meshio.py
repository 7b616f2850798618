from collections import Counter

import numpy as np
import pytest

from minannuli.annulus import build_chart, newton_solve
from minannuli.curves import BoundaryCurve, CurvePair
from minannuli.errors import DomainError
from minannuli.graphsolver import PolarGrid, solve_minimal_graph
from minannuli.meshio import (annulus_mesh, catenoid_mesh, graph_mesh, read_obj, write_csv, write_mesh, write_obj,
                              write_ply)


def _edges(faces):
    c = Counter()
    for f in faces:
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            c[(min(a, b), max(a, b))] += 1
    return c


def test_catenoid_mesh_has_ring_topology():
    n_t, n_th = 17, 12
    v, f = catenoid_mesh(1.0, n_t, n_th)
    assert len(v) == n_t * n_th
    e = _edges(f)
    assert set(e.values()) <= {1, 2}
    # only the two boundary rings are open
    assert sum(1 for k in e.values() if k == 1) == 2 * n_th
    assert len(v) - len(e) + len(f) == 0  # Euler characteristic of an annulus
    r = np.hypot(v[:, 0], v[:, 1])
    assert r.max() == pytest.approx(1.0) and r.min() > 0


def test_obj_round_trip(tmp_path):
    v, f = catenoid_mesh(0.8, 17, 8)
    path = write_obj(tmp_path / "c.obj", v, f)
    v2, f2 = read_obj(path)
    np.testing.assert_array_equal(v2, v)
    np.testing.assert_array_equal(f2, f)


def test_ply_header(tmp_path):
    v, f = catenoid_mesh(0.8, 17, 8)
    text = write_ply(tmp_path / "c.ply", v, f).read_text().splitlines()
    assert text[0] == "ply" and f"element vertex {len(v)}" in text and f"element face {len(f)}" in text
    assert len(text) == text.index("end_header") + 1 + len(v) + len(f)


def test_write_mesh_dispatch_and_validation(tmp_path):
    v, f = catenoid_mesh(0.8, 17, 8)
    assert write_mesh(tmp_path / "a.ply", v, f).read_text().startswith("ply")
    assert write_mesh(tmp_path / "a.dat", v, f, "obj").read_text().startswith("v ")
    with pytest.raises(DomainError):
        write_mesh(tmp_path / "a.stl", v, f)
    with pytest.raises(DomainError):
        write_obj(tmp_path / "bad.obj", v, f + len(v))
    with pytest.raises(DomainError):
        write_obj(tmp_path / "bad.obj", v[:, :2], f)


def test_annulus_and_graph_meshes_are_valid():
    ch = build_chart(h=0.8, n_t=49, n_theta=16)
    sol = newton_solve(ch, CurvePair.catenoid(ch.h))
    v, f = annulus_mesh(sol)
    assert f.min() >= 0 and f.max() < len(v) and len(v) == ch.n_nodes
    g = solve_minimal_graph(BoundaryCurve({1: (0.2, 0.0)}), PolarGrid(6, 12))
    v, f = graph_mesh(g)
    e = _edges(f)
    assert len(v) - len(e) + len(f) == 1  # a disk
    a = solve_minimal_graph(0.0, PolarGrid(6, 12, r_inner=0.4), inner=0.1)
    v, f = graph_mesh(a)
    assert len(v) - len(_edges(f)) + len(f) == 0


def test_csv_is_lossless(tmp_path):
    rows = [(0.1, 1 / 3), (2.0, np.pi)]
    text = write_csv(tmp_path / "t.csv", ["a", "b"], rows).read_text().splitlines()
    assert text[0] == "a,b"
    assert float(text[1].split(",")[1]) == 1 / 3
