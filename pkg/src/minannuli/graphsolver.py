"""Minimal vertical graphs over the Poincare disk.

A graph t = u(z) over a domain of the disk is minimal iff it is critical for

    A(u) = integral of lambda^2 sqrt(1 + F |grad u|^2) dx dy,

where F = (1 - |z|^2)^2 / 4 and lambda^2 F = 1.  The Euler-Lagrange
equation is div(grad u / sqrt(1 + F |grad u|^2)) = 0 with the Euclidean
divergence, nondegenerate up to the ideal boundary |z| = 1.

We discretize with P1 elements on a polar mesh (a center node with a fan of
triangles, then quads split along both diagonals with weight 1/2 each so
the mesh has the full discrete rotation symmetry) and minimize the discrete
energy sum w|T| (sqrt(1 + F_T |grad u|^2) - 1) / F_T with damped Newton.
The energy is convex, so the minimizer is unique.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import _kernels
from .curves import BoundaryCurve, theta_grid
from .errors import DomainError, NonConvergence

__all__ = [
    "PolarGrid",
    "NewtonOptions",
    "GraphSolution",
    "harmonic_init",
    "solve_minimal_graph",
    "normal_trace",
    "ring_fluxes",
]


class PolarGrid:
    """Polar P1 mesh of the unit disk, or of the annulus r_inner <= |z| <= 1.

    ``n_r`` radial intervals and ``n_theta`` angular nodes per ring.  For the
    disk, node 0 is the center and ring i (1..n_r) has radius i / n_r.  For an
    annulus ring i (0..n_r) has radius r_inner + i (1 - r_inner) / n_r.
    """

    def __init__(self, n_r: int, n_theta: int, r_inner: float = 0.0):
        if n_r < 3 or n_theta < 8:
            raise DomainError("grid needs n_r >= 3 and n_theta >= 8")
        if not 0.0 <= r_inner < 1.0:
            raise DomainError("r_inner must lie in [0, 1)")
        self.n_r = n_r
        self.n_theta = n_theta
        self.r_inner = float(r_inner)
        self.theta = theta_grid(n_theta)
        self.is_disk = r_inner == 0.0
        if self.is_disk:
            self.radii = np.arange(n_r + 1) / n_r
        else:
            self.radii = r_inner + (1.0 - r_inner) * np.arange(n_r + 1) / n_r
        self.dr = float(self.radii[1] - self.radii[0])
        self._build()

    # node numbering

    def node(self, ring: int, j) -> np.ndarray:
        """Index of the node on ring ``ring`` at angular position ``j`` (mod n_theta)."""
        j = np.asarray(j) % self.n_theta
        if self.is_disk:
            if ring == 0:
                return np.zeros_like(j)
            return 1 + (ring - 1) * self.n_theta + j
        return ring * self.n_theta + j

    def ring_nodes(self, ring: int) -> np.ndarray:
        if self.is_disk and ring == 0:
            return np.array([0])
        return self.node(ring, np.arange(self.n_theta))

    def _build(self):
        nt = self.n_theta
        j = np.arange(nt)
        if self.is_disk:
            xy = [np.zeros((1, 2))]
            ring_of = [np.zeros(1, dtype=int)]
        else:
            xy, ring_of = [], []
        first = 1 if self.is_disk else 0
        for i in range(first, self.n_r + 1):
            r = self.radii[i]
            xy.append(np.column_stack([r * np.cos(self.theta), r * np.sin(self.theta)]))
            ring_of.append(np.full(nt, i))
        self.xy = np.vstack(xy)
        self.ring_index = np.concatenate(ring_of)
        self.n_nodes = len(self.xy)

        tris, weights = [], []
        if self.is_disk:
            c = self.node(0, j)
            tris.append(np.column_stack([c, self.node(1, j), self.node(1, j + 1)]))
            weights.append(np.ones(nt))
        for i in range(first, self.n_r):
            a, b = self.node(i, j), self.node(i, j + 1)
            c, d = self.node(i + 1, j), self.node(i + 1, j + 1)
            # both diagonals, half weight each
            tris += [np.column_stack([a, c, d]), np.column_stack([a, d, b]),
                     np.column_stack([a, c, b]), np.column_stack([b, c, d])]
            weights += [np.full(nt, 0.5)] * 4
        self.tri = np.ascontiguousarray(np.vstack(tris), dtype=np.int64)
        self.weight = np.concatenate(weights)

        P = self.xy[self.tri]  # (T,3,2)
        e1 = P[:, 1] - P[:, 0]
        e2 = P[:, 2] - P[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if np.any(det <= 0):
            raise DomainError("mesh has inverted triangles")
        self.tri_area = 0.5 * det
        # gradients of barycentric coordinates
        g1 = np.column_stack([e2[:, 1], -e2[:, 0]]) / det[:, None]
        g2 = np.column_stack([-e1[:, 1], e1[:, 0]]) / det[:, None]
        self.grads = np.ascontiguousarray(np.stack([-g1 - g2, g1, g2], axis=1))
        centroid = P.mean(axis=1)
        self.F_centroid = np.ascontiguousarray((1.0 - np.sum(centroid ** 2, axis=1)) ** 2 / 4.0)
        self.w_area = np.ascontiguousarray(self.weight * self.tri_area)

        rows = np.repeat(self.tri, 3, axis=1).ravel()
        cols = np.tile(self.tri, (1, 3)).ravel()
        self._rows, self._cols = rows, cols

        outer = self.ring_nodes(self.n_r)
        dirichlet = outer if self.is_disk else np.concatenate([self.ring_nodes(0), outer])
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[dirichlet] = False
        self.dirichlet = dirichlet
        self.interior = np.flatnonzero(mask)

    def matrix(self, values) -> sp.csr_matrix:
        return sp.csr_matrix((values, (self._rows, self._cols)), shape=(self.n_nodes, self.n_nodes))

    def stiffness(self) -> sp.csr_matrix:
        """Euclidean P1 Laplacian (the linearization of the graph operator at u = const)."""
        vals = np.einsum("tkd,tld->tkl", self.grads, self.grads) * self.w_area[:, None, None]
        return self.matrix(vals.ravel())

    def polar(self):
        r = np.hypot(self.xy[:, 0], self.xy[:, 1])
        th = np.mod(np.arctan2(self.xy[:, 1], self.xy[:, 0]), 2 * np.pi)
        return r, th

    def as_rings(self, u) -> np.ndarray:
        """Values on rings 1..n_r (disk) or 0..n_r (annulus) as an (rings, n_theta) array."""
        u = np.asarray(u)
        return (u[1:] if self.is_disk else u).reshape(-1, self.n_theta)


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 50
    armijo: float = 1e-4
    min_step: float = 1e-8
    # also stop once a full Newton step is this small relative to max(1, |u|)
    step_tol: float = 1e-15


@dataclass
class GraphSolution:
    grid: PolarGrid
    u: np.ndarray
    boundary_trace: np.ndarray
    normal_trace: np.ndarray
    residual_norm: float
    iterations: int
    history: list = field(default_factory=list)

    def rows(self):
        """(r, theta, u) rows for CSV export."""
        r, th = self.grid.polar()
        return np.column_stack([r, th, self.u])

    def summary(self) -> dict:
        return {
            "n_r": self.grid.n_r,
            "n_theta": self.grid.n_theta,
            "r_inner": self.grid.r_inner,
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "residual_history": list(self.history),
            "vertical_flux": float(np.mean(self.normal_trace) * 2 * np.pi),
            "u_min": float(self.u.min()),
            "u_max": float(self.u.max()),
        }


def _boundary_values(data, theta) -> np.ndarray:
    if isinstance(data, BoundaryCurve):
        return data(theta)
    if callable(data):
        return np.asarray(data(theta), dtype=float) * np.ones_like(theta)
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0:
        return np.full_like(theta, float(arr))
    if arr.shape != theta.shape:
        raise DomainError(f"boundary samples have shape {arr.shape}, expected {theta.shape}")
    return arr


def _dirichlet_vector(grid: PolarGrid, gamma, inner):
    g = np.zeros(grid.n_nodes)
    g[grid.ring_nodes(grid.n_r)] = _boundary_values(gamma, grid.theta)
    if not grid.is_disk:
        if inner is None:
            raise DomainError("annular grids need inner boundary data")
        g[grid.ring_nodes(0)] = _boundary_values(inner, grid.theta)
    elif inner is not None:
        raise DomainError("inner data given for a disk grid")
    return g


def harmonic_init(gamma, grid: PolarGrid, inner=None) -> np.ndarray:
    """Discrete harmonic extension of the Dirichlet data."""
    u = _dirichlet_vector(grid, gamma, inner)
    K = grid.stiffness()
    I, D = grid.interior, grid.dirichlet
    rhs = -K[I][:, D] @ u[D]
    u[I] = spsolve(K[I][:, I].tocsc(), rhs)
    return u


def _assemble(grid: PolarGrid, u):
    return _kernels.graph_assemble(np.ascontiguousarray(u, dtype=float), grid.tri, grid.grads,
                                   grid.w_area, grid.F_centroid)


def solve_minimal_graph(gamma, grid: PolarGrid, opts: NewtonOptions | None = None, inner=None,
                        init: str | np.ndarray = "harmonic") -> GraphSolution:
    """Damped Newton for the discrete minimal graph with Dirichlet data ``gamma`` at r = 1.

    ``inner`` gives data on the inner ring when the grid is an annulus.
    ``init`` is "harmonic", "zero" or an array of nodal values (boundary
    entries are overwritten).
    """
    opts = opts or NewtonOptions()
    g = _dirichlet_vector(grid, gamma, inner)
    if isinstance(init, str):
        if init == "harmonic":
            u = harmonic_init(gamma, grid, inner)
        elif init == "zero":
            u = g.copy()
        else:
            raise DomainError(f"unknown init {init!r}")
    else:
        u = np.array(init, dtype=float)
        u[grid.dirichlet] = g[grid.dirichlet]
    I = grid.interior

    energy, res, hv = _assemble(grid, u)
    rnorm = float(np.max(np.abs(res[I]), initial=0.0))
    history = [rnorm]
    it = 0
    while rnorm > opts.tol:
        if it >= opts.max_iter:
            raise NonConvergence(f"graph Newton stalled at residual {rnorm:.3e}", history=history)
        H = grid.matrix(hv)
        step = np.zeros_like(u)
        step[I] = -spsolve(H[I][:, I].tocsc(), res[I])
        if np.max(np.abs(step)) <= opts.step_tol * max(1.0, float(np.max(np.abs(u)))):
            break
        # Armijo backtracking on the residual norm
        alpha = 1.0
        while True:
            trial = u + alpha * step
            e_t, r_t, h_t = _assemble(grid, trial)
            n_t = float(np.max(np.abs(r_t[I])))
            if n_t <= (1.0 - opts.armijo * alpha) * rnorm or n_t <= opts.tol:
                break
            alpha *= 0.5
            if alpha < opts.min_step:
                raise NonConvergence("line search failed", history=history)
        u, energy, res, hv, rnorm = trial, e_t, r_t, h_t, n_t
        history.append(rnorm)
        it += 1

    sol = GraphSolution(grid=grid, u=u, boundary_trace=u[grid.ring_nodes(grid.n_r)].copy(),
                        normal_trace=np.zeros(grid.n_theta), residual_norm=rnorm,
                        iterations=it, history=history)
    sol.normal_trace = normal_trace(sol)
    return sol


def normal_trace(sol: GraphSolution) -> np.ndarray:
    """u_r(1, theta_j) by the second-order one-sided stencil on the last three rings."""
    grid = sol.grid
    n = grid.n_r
    uN = sol.u[grid.ring_nodes(n)]
    u1 = sol.u[grid.ring_nodes(n - 1)]
    u2 = sol.u[grid.ring_nodes(n - 2)]
    return (3.0 * uN - 4.0 * u1 + u2) / (2.0 * grid.dr)


def ring_fluxes(sol: GraphSolution) -> np.ndarray:
    """Discrete flux of grad u / sqrt(1 + F|grad u|^2) across each strip between rings.

    Strip i uses the cut-off chi_i = 1 on rings <= i and 0 beyond; the
    result approximates the integral of r u_r / sqrt(1 + F u_r^2) over the
    circle of radius r_{i+1/2}.  For an exact discrete solution these are
    equal across strips up to round-off.
    """
    grid = sol.grid
    g = np.einsum("tk,tkd->td", sol.u[grid.tri], grid.grads)
    q = np.sum(g * g, axis=1)
    a = 1.0 / np.sqrt(1.0 + grid.F_centroid * q)
    out = []
    for i in range(grid.n_r):
        chi = (grid.ring_index <= i).astype(float)
        gchi = np.einsum("tk,tkd->td", chi[grid.tri], grid.grads)
        out.append(-float(np.sum(grid.w_area * a * np.sum(g * gchi, axis=1))))
    return np.array(out)
