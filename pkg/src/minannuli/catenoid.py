"""Rotationally invariant catenoids C_{h, z0} in H^2 x R.

The profile r(t) of a catenoid around the vertical axis through the origin
satisfies the first integral

    kappa^2 = (1 - r^2)^2 / (4 r^2) + (r' / r)^2,

so t(r) is a quadrature.  Writing r = r_min + s^2 removes the square-root
singularity at the neck r_min = sqrt(1 + kappa^2) - kappa:

    dt/ds = 4 / sqrt((r + r_min + 2 kappa) (2 kappa r + 1 - r^2)),

which is smooth on [0, sqrt(1 - r_min)].  Everything here (half-height,
profile, graph of the ends) is computed from that regularized integrand.

The half-height h(kappa) is strictly *decreasing*: kappa -> 0 gives
h -> pi/2 and kappa -> infinity gives h -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, NumericsError
from .geometry import DiskPoint

__all__ = [
    "CatenoidParams",
    "CatenoidProfile",
    "neck_radius",
    "half_height_from_kappa",
    "kappa_from_half_height",
    "profile",
    "graph_normal_trace",
    "graph_height",
    "graph_slope",
    "catenoid_params",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def neck_radius(kappa: float) -> float:
    """Minimum radius sqrt(1 + kappa^2) - kappa of the profile."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    # rationalized form avoids cancellation for large kappa
    return 1.0 / (math.sqrt(1.0 + kappa * kappa) + kappa)


def _dt_ds(s, kappa, r_min):
    r = r_min + s * s
    return 4.0 / np.sqrt((r + r_min + 2.0 * kappa) * (2.0 * kappa * r + 1.0 - r * r))


def _check_kappa(kappa):
    if not kappa > 0 or not math.isfinite(kappa):
        raise DomainError(f"kappa must be a positive finite number, got {kappa}")


def half_height_from_kappa(kappa: float, tol: float = 1e-12) -> float:
    """h(kappa) = integral of dr / (r sqrt(kappa^2 - (1-r^2)^2/(4r^2))) over [r_min, 1]."""
    _check_kappa(kappa)
    r_min = neck_radius(kappa)
    s_max = math.sqrt(1.0 - r_min)
    # complex singularities sit at s = +-i sqrt(2 r_min); tell quad where the
    # integrand varies fastest
    knee = math.sqrt(2.0 * r_min)
    points = [knee] if knee < s_max else None
    h, err = quad(_dt_ds, 0.0, s_max, args=(kappa, r_min), epsabs=tol, epsrel=0.0,
                  limit=500, points=points)
    if not err <= tol:
        raise NumericsError(f"half-height quadrature error {err:.3e} exceeds {tol:.3e}", estimate=err)
    return h


def kappa_from_half_height(h: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Invert h(kappa) by bracketed root finding in log(kappa)."""
    if not (0.0 < h < math.pi / 2):
        raise DomainError(f"half-height must lie in (0, pi/2), got {h}")
    lo, hi = math.log(1e-6), math.log(1e6)

    def g(logk):
        return half_height_from_kappa(math.exp(logk), tol) - h

    # h is decreasing: g(lo) > 0 > g(hi) once the bracket is wide enough
    for _ in range(60):
        if g(lo) > 0:
            break
        lo -= math.log(1e3)
    for _ in range(60):
        if g(hi) < 0:
            break
        hi += math.log(1e3)
    glo, ghi = g(lo), g(hi)
    if not (glo > 0 > ghi):
        raise NumericsError(f"could not bracket h={h}")
    logk = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=max_iter)
    return math.exp(logk)


@dataclass(frozen=True)
class CatenoidParams:
    kappa: float
    h: float
    z0: DiskPoint = DiskPoint(0.0, 0.0)


def catenoid_params(kappa: float | None = None, h: float | None = None,
                    z0: DiskPoint | complex = 0j) -> CatenoidParams:
    """Build consistent parameters from either kappa or h."""
    if (kappa is None) == (h is None):
        raise DomainError("give exactly one of kappa, h")
    if kappa is None:
        kappa = kappa_from_half_height(h)
    h = half_height_from_kappa(kappa)
    if not isinstance(z0, DiskPoint):
        z0 = DiskPoint.from_complex(complex(z0))
    return CatenoidParams(kappa, h, z0)


class _Quadrature:
    """Cumulative table of t(s) on panels fine enough for 10-point Gauss rules."""

    def __init__(self, kappa, n_panels):
        self.kappa = kappa
        self.r_min = neck_radius(kappa)
        self.s_max = math.sqrt(1.0 - self.r_min)
        width = 0.5 * math.sqrt(2.0 * self.r_min)
        n_panels = max(n_panels, int(math.ceil(self.s_max / width)))
        self.edges = np.linspace(0.0, self.s_max, n_panels + 1)
        self.cum = np.concatenate([[0.0], np.cumsum(self._segment(self.edges[:-1], self.edges[1:]))])

    def _segment(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        nodes = mid[..., None] + half[..., None] * _GL_X
        return half * np.sum(_GL_W * _dt_ds(nodes, self.kappa, self.r_min), axis=-1)

    def t_of_s(self, s):
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.edges, s, side="right") - 1, 0, len(self.edges) - 2)
        return self.cum[k] + self._segment(self.edges[k], s)

    def s_of_t(self, t, max_iter=50):
        """Newton inversion of t(s) = t for 0 <= t <= h."""
        t = np.asarray(t, dtype=float)
        h = self.cum[-1]
        s = np.interp(t, self.cum, self.edges)
        for _ in range(max_iter):
            step = (self.t_of_s(s) - t) / _dt_ds(s, self.kappa, self.r_min)
            s = np.clip(s - step, 0.0, self.s_max)
            if np.max(np.abs(step)) < 1e-15:
                break
        else:
            raise NumericsError("profile inversion did not converge", estimate=float(np.max(np.abs(step))))
        s[t >= h] = self.s_max
        return s


@dataclass(frozen=True)
class CatenoidProfile:
    """Samples of the radius r(t) on a uniform grid of [-h, h]."""

    kappa: float
    h: float
    t: np.ndarray
    r: np.ndarray
    dr: np.ndarray  # exact r'(t) from the first integral
    r_min: float

    @property
    def n_nodes(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def first_integral_residual(self) -> np.ndarray:
        """kappa^2 - (1-r^2)^2/(4r^2) - (r'/r)^2 at interior nodes, r' by centered differences."""
        r = self.r
        drc = (r[2:] - r[:-2]) / (2.0 * self.dt)
        ri = r[1:-1]
        return self.kappa ** 2 - (1.0 - ri ** 2) ** 2 / (4.0 * ri ** 2) - (drc / ri) ** 2

    def log_derivative(self) -> np.ndarray:
        """r'/r, the vertical-translation Jacobi field (up to a constant)."""
        return self.dr / self.r


def profile(kappa: float, n_nodes: int = 513, tol: float = 1e-13) -> CatenoidProfile:
    """Radius profile on ``n_nodes`` uniform nodes of [-h, h]."""
    _check_kappa(kappa)
    if n_nodes < 16:
        raise DomainError("n_nodes must be at least 16")
    quadr = _Quadrature(kappa, n_panels=4 * n_nodes)
    h = float(quadr.cum[-1])
    h_ref = half_height_from_kappa(kappa, tol=max(tol, 1e-13))
    if abs(h - h_ref) > 1e-10:
        raise NumericsError(f"panel quadrature h={h} disagrees with adaptive h={h_ref}", estimate=abs(h - h_ref))
    t = np.linspace(-h, h, n_nodes)
    half = n_nodes // 2
    t_pos = -t[:half][::-1] if n_nodes % 2 == 0 else -t[: half + 1][::-1]
    s_pos = quadr.s_of_t(t_pos)
    s = np.empty(n_nodes)
    if n_nodes % 2 == 0:
        s[half:] = s_pos
        s[:half] = s_pos[::-1]
    else:
        s[half:] = s_pos
        s[: half + 1] = s_pos[::-1]
    r_min = quadr.r_min
    r = r_min + s * s
    r[0] = r[-1] = 1.0
    dr = np.sign(t) * 0.5 * s * np.sqrt((r + r_min + 2.0 * kappa) * (2.0 * kappa * r + 1.0 - r * r))
    return CatenoidProfile(kappa=kappa, h=h, t=t, r=r, dr=dr, r_min=r_min)


def graph_normal_trace(kappa: float) -> float:
    """d/dr of the top-end graph at r = 1; equals 1/kappa for every theta."""
    _check_kappa(kappa)
    return 1.0 / kappa


def graph_height(kappa: float, rho, end: int = +1, h: float | None = None):
    """Height of the top (end=+1) or bottom (end=-1) graph over radius rho in [r_min, 1].

    The regularized integrand extends analytically past rho = 1, so the
    function is smooth there (handy for one-sided stencils at the boundary).
    """
    _check_kappa(kappa)
    rho = np.asarray(rho, dtype=float)
    r_min = neck_radius(kappa)
    if h is None:
        h = half_height_from_kappa(kappa)
    s_max = math.sqrt(1.0 - r_min)
    s = np.sqrt(np.maximum(rho - r_min, 0.0))
    # integrate from s to s_max with Gauss panels; the gap is short near the boundary
    quadr = _Quadrature(kappa, n_panels=64)
    mid = 0.5 * (s + s_max)
    half = 0.5 * (s_max - s)
    nodes = mid[..., None] + half[..., None] * _GL_X
    tail = half * np.sum(_GL_W * _dt_ds(nodes, kappa, r_min), axis=-1)
    near = np.abs(s_max - s) < 0.25
    t = np.where(near, h - tail, quadr.t_of_s(np.minimum(s, s_max)))
    return end * t


def graph_slope(kappa: float, rho, end: int = +1):
    """d/drho of the end graph: end * 1 / r'(t) expressed through rho."""
    _check_kappa(kappa)
    rho = np.asarray(rho, dtype=float)
    r_min = neck_radius(kappa)
    return end * 2.0 / np.sqrt((rho - r_min) * (rho + r_min + 2.0 * kappa) * (2.0 * kappa * rho + 1.0 - rho * rho))
