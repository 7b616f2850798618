"""Plain-text exports: OBJ and ASCII PLY meshes, CSV tables."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DomainError

__all__ = [
    "periodic_strip_faces",
    "polar_faces",
    "catenoid_mesh",
    "annulus_mesh",
    "graph_mesh",
    "write_obj",
    "write_ply",
    "write_mesh",
    "read_obj",
    "write_csv",
]


def periodic_strip_faces(n_rows: int, n_cols: int, offset: int = 0) -> np.ndarray:
    """Triangles of a row-major (n_rows, n_cols) grid whose columns wrap around."""
    idx = offset + np.arange(n_rows * n_cols).reshape(n_rows, n_cols)
    a = idx[:-1]
    b = np.roll(idx, -1, axis=1)[:-1]
    c = idx[1:]
    d = np.roll(idx, -1, axis=1)[1:]
    return np.vstack([np.column_stack([a.ravel(), c.ravel(), d.ravel()]),
                      np.column_stack([a.ravel(), d.ravel(), b.ravel()])])


def polar_faces(n_r: int, n_theta: int) -> np.ndarray:
    """Center fan plus ring strips for a disk PolarGrid numbering."""
    j = np.arange(n_theta)
    fan = np.column_stack([np.zeros(n_theta, dtype=int), 1 + j, 1 + (j + 1) % n_theta])
    return np.vstack([fan, periodic_strip_faces(n_r, n_theta, offset=1)])


def catenoid_mesh(kappa: float, n_t: int = 65, n_theta: int = 64):
    """Catenoid of revolution in disk-times-line coordinates."""
    from .catenoid import profile

    prof = profile(kappa, n_t)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    R, TH = np.meshgrid(prof.r, th, indexing="ij")
    T = np.repeat(prof.t[:, None], n_theta, axis=1)
    verts = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel(), T.ravel()])
    return verts, periodic_strip_faces(n_t, n_theta)


def annulus_mesh(sol):
    """Triangulated immersion of an AnnulusSolution."""
    return sol.immersion(), periodic_strip_faces(sol.chart.n_t, sol.chart.n_theta)


def graph_mesh(sol):
    """Height surface (x, y, u) of a GraphSolution."""
    g = sol.grid
    verts = np.column_stack([g.xy, sol.u])
    if g.is_disk:
        faces = polar_faces(g.n_r, g.n_theta)
    else:
        faces = periodic_strip_faces(g.n_r + 1, g.n_theta)
    return verts, faces


def _check(verts, faces):
    verts = np.asarray(verts, dtype=float)
    faces = np.asarray(faces, dtype=int)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise DomainError("vertices must be an (N, 3) array")
    if faces.size and (faces.min() < 0 or faces.max() >= len(verts)):
        raise DomainError("face index out of range")
    return verts, faces


def write_obj(path, verts, faces) -> Path:
    verts, faces = _check(verts, faces)
    path = Path(path)
    with path.open("w") as fh:
        for v in verts:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for f in faces + 1:
            fh.write(f"f {f[0]} {f[1]} {f[2]}\n")
    return path


def write_ply(path, verts, faces) -> Path:
    verts, faces = _check(verts, faces)
    path = Path(path)
    with path.open("w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(verts)}\nproperty double x\nproperty double y\nproperty double z\n")
        fh.write(f"element face {len(faces)}\nproperty list uchar int vertex_indices\nend_header\n")
        for v in verts:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for f in faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")
    return path


def write_mesh(path, verts, faces, fmt: str | None = None) -> Path:
    fmt = (fmt or Path(path).suffix.lstrip(".") or "obj").lower()
    if fmt == "obj":
        return write_obj(path, verts, faces)
    if fmt == "ply":
        return write_ply(path, verts, faces)
    raise DomainError(f"unknown mesh format {fmt!r}")


def read_obj(path):
    verts, faces = [], []
    with Path(path).open() as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    return np.array(verts), np.array(faces, dtype=int)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])
    return path
