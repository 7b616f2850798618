"""Fluxes of minimal annuli across their ends, and the center map.

Near its ends a properly embedded minimal annulus is a pair of vertical
graphs t = u^+(r, theta) and t = u^-(r, theta) over an outer annulus of the
disk.  With end traces at r = 1 (where F = 0 so the conormal weight is 1):

    vertical     Flux(E3)  = +- integral u_r dtheta
    rotational   Flux(Z)   = -+ integral u_r u_theta dtheta
    dilational   Flux(H_a) = +- integral u_r u_theta sin(theta - a) dtheta

with the upper sign on the top end and the lower sign on the bottom end.
The conservation residuals add the *unsigned* integrals of the two ends,
e.g. integral u^+_r + integral u^-_r; for the catenoid u^+_r = 1/kappa and
u^-_r = -1/kappa, so the signed top and bottom vertical fluxes are both
2 pi / kappa while the raw integrals cancel.

The center of an annulus compares the bottom end with the minimal disk D^-
spanning the bottom curve alone (normal trace v^-_r):

    f0 = integral (u^-_r - v^-_r),   f1 + i f2 = integral e^{i theta} (u^-_r - v^-_r),
    G0 = f0 - 1/f0,  (G1, G2) = (f1, f2) / f0,  center = G1 + i G2.

All theta integrals use the trapezoid rule on the uniform periodic grid,
which is spectrally accurate for smooth periodic integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catenoid import graph_slope, half_height_from_kappa
from .curves import theta_grid
from .errors import DomainError
from .geometry import DiskPoint

__all__ = [
    "EndTrace",
    "FluxReport",
    "CenterReport",
    "spectral_derivative",
    "flux_vertical",
    "flux_rotational",
    "flux_dilation",
    "flux_dilation_cos",
    "flux_report",
    "conservation_residuals",
    "orientation_check",
    "membership",
    "center",
    "catenoid_traces",
    "dilated_catenoid_bottom_trace",
    "finite_radius_vertical_flux",
]

TOP, BOTTOM = "top", "bottom"


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """d/dtheta of uniform periodic samples by FFT (Nyquist mode dropped)."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    k = np.fft.rfftfreq(n, 1.0 / n)
    c = np.fft.rfft(v) * 1j * k
    if n % 2 == 0:
        c[-1] = 0.0
    return np.fft.irfft(c, n)


def _integral(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(2.0 * np.pi * np.mean(v))


@dataclass(frozen=True)
class EndTrace:
    end: str
    u: np.ndarray
    u_r: np.ndarray
    u_theta: np.ndarray

    def __post_init__(self):
        if self.end not in (TOP, BOTTOM):
            raise DomainError(f"end must be 'top' or 'bottom', got {self.end!r}")
        n = len(self.u)
        if len(self.u_r) != n or len(self.u_theta) != n:
            raise DomainError("trace arrays must share one theta grid")

    @classmethod
    def from_samples(cls, end: str, u, u_r, u_theta=None) -> "EndTrace":
        u = np.asarray(u, dtype=float)
        u_r = np.asarray(u_r, dtype=float) * np.ones_like(u)
        if u_theta is None:
            u_theta = spectral_derivative(u)
        return cls(end, u, u_r, np.asarray(u_theta, dtype=float) * np.ones_like(u))

    @property
    def sign(self) -> float:
        return 1.0 if self.end == TOP else -1.0

    @property
    def theta(self) -> np.ndarray:
        return theta_grid(len(self.u))

    def theta_consistency(self) -> float:
        """max |u_theta - spectral derivative of u|."""
        return float(np.max(np.abs(self.u_theta - spectral_derivative(self.u))))

    def rotated(self, zeta: float) -> "EndTrace":
        """Trace of the annulus rotated by zeta: samples of f(theta - zeta), by FFT phase shift."""
        return EndTrace(self.end, _shift(self.u, zeta), _shift(self.u_r, zeta), _shift(self.u_theta, zeta))

    def scaled_normal(self, c: float) -> "EndTrace":
        return EndTrace(self.end, self.u, c * self.u_r, self.u_theta)

    def to_dict(self) -> dict:
        return {"end": self.end, "u": self.u.tolist(), "u_r": self.u_r.tolist(), "u_theta": self.u_theta.tolist()}


def _shift(values, zeta):
    v = np.asarray(values, dtype=float)
    n = len(v)
    k = np.fft.rfftfreq(n, 1.0 / n)
    c0 = np.fft.rfft(v)
    c = c0 * np.exp(-1j * k * zeta)
    if n % 2 == 0:
        # real part of the shifted Nyquist wave on the grid
        c[-1] = c0[-1] * math.cos(k[-1] * zeta)
    return np.fft.irfft(c, n)


def flux_vertical(trace: EndTrace) -> float:
    return trace.sign * _integral(trace.u_r)


def flux_rotational(trace: EndTrace) -> float:
    return -trace.sign * _integral(trace.u_r * trace.u_theta)


def flux_dilation(trace: EndTrace, a) -> np.ndarray | float:
    """Dilational flux for one direction ``a`` or an array of directions."""
    th = trace.theta
    w = trace.u_r * trace.u_theta
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    out = trace.sign * 2.0 * np.pi * np.mean(w[None, :] * np.sin(th[None, :] - a_arr[:, None]), axis=1)
    return float(out[0]) if np.ndim(a) == 0 else out


def flux_dilation_cos(trace: EndTrace, a) -> np.ndarray | float:
    """Same as flux_dilation with the kernel cos(theta - a)."""
    th = trace.theta
    w = trace.u_r * trace.u_theta
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    out = trace.sign * 2.0 * np.pi * np.mean(w[None, :] * np.cos(th[None, :] - a_arr[:, None]), axis=1)
    return float(out[0]) if np.ndim(a) == 0 else out


@dataclass
class FluxReport:
    end: str
    vertical: float
    rotational: float
    a_grid: np.ndarray
    dilation: np.ndarray

    def to_dict(self) -> dict:
        return {
            "end": self.end,
            "vertical": self.vertical,
            "rotational": self.rotational,
            "a_grid": self.a_grid.tolist(),
            "dilation": self.dilation.tolist(),
        }


def flux_report(trace: EndTrace, n_a: int = 64) -> FluxReport:
    a = theta_grid(n_a)
    return FluxReport(trace.end, flux_vertical(trace), flux_rotational(trace), a, flux_dilation(trace, a))


def conservation_residuals(top: EndTrace, bottom: EndTrace, n_a: int = 64) -> dict:
    """Residuals of the three conservation identities between the ends."""
    if top.end != TOP or bottom.end != BOTTOM:
        raise DomainError("expected a (top, bottom) pair of traces")
    a = theta_grid(n_a)
    vertical = abs(_integral(top.u_r) + _integral(bottom.u_r))
    rotational = abs(_integral(top.u_r * top.u_theta) + _integral(bottom.u_r * bottom.u_theta))
    wt, wb = top.u_r * top.u_theta, bottom.u_r * bottom.u_theta
    th = top.theta
    if len(bottom.u) != len(top.u):
        raise DomainError("traces must share one theta grid")
    kern = np.sin(th[None, :] - a[:, None])
    dil = 2.0 * np.pi * np.mean((wt + wb)[None, :] * kern, axis=1)
    return {"vertical": vertical, "rotational": rotational, "dilation": float(np.max(np.abs(dil)))}


def orientation_check(top: EndTrace, bottom: EndTrace, tol: float = 1e-4, n_a: int = 64) -> dict:
    """Conservation under the stored orientation and under a flipped bottom normal.

    ``ambiguous`` is set when neither choice conserves within ``tol``, so the
    trace set cannot pin the flux signs.
    """
    kept = max(conservation_residuals(top, bottom, n_a).values())
    flipped = max(conservation_residuals(top, bottom.scaled_normal(-1.0), n_a).values())
    return {"kept": kept, "flipped": flipped, "ambiguous": bool(min(kept, flipped) > tol)}


def membership(bottom_u_r, disk_v_r) -> bool:
    """Strict inequality u^-_r < v^-_r at every sample."""
    return bool(np.all(np.asarray(bottom_u_r) - np.asarray(disk_v_r) < 0.0))


@dataclass
class CenterReport:
    f0: float
    f1: float
    f2: float
    G0: float
    G1: float
    G2: float
    center: DiskPoint

    def to_dict(self) -> dict:
        return {"f0": self.f0, "f1": self.f1, "f2": self.f2, "G0": self.G0, "G1": self.G1, "G2": self.G2,
                "center": [self.center.x, self.center.y]}


def center(bottom: EndTrace, disk_v_r) -> CenterReport:
    """Extended-map quantities of an annulus from its bottom trace and the disk D^-."""
    if bottom.end != BOTTOM:
        raise DomainError("center needs the bottom end trace")
    v_r = np.asarray(disk_v_r, dtype=float) * np.ones_like(bottom.u_r)
    diff = bottom.u_r - v_r
    if not np.all(diff < 0.0):
        raise DomainError("membership condition u^-_r < v^-_r fails; the center may leave the disk")
    th = bottom.theta
    f0 = _integral(diff)
    f1 = _integral(np.cos(th) * diff)
    f2 = _integral(np.sin(th) * diff)
    G1, G2 = f1 / f0, f2 / f0
    return CenterReport(f0=f0, f1=f1, f2=f2, G0=f0 - 1.0 / f0, G1=G1, G2=G2, center=DiskPoint(G1, G2))


def catenoid_traces(kappa: float, h: float, n_theta: int):
    """Exact end traces of the centered catenoid: u^+ = h, u^+_r = 1/kappa and mirrored."""
    ones = np.ones(n_theta)
    zero = np.zeros(n_theta)
    return (EndTrace(TOP, h * ones, ones / kappa, zero.copy()),
            EndTrace(BOTTOM, -h * ones, -ones / kappa, zero.copy()))


def dilated_catenoid_bottom_trace(kappa: float, z0: complex, n_theta: int) -> EndTrace:
    """Bottom trace of the catenoid with axis through z0.

    The bottom end is t = U(|T_{-z0}(z)|) with U the centered bottom graph.
    At |z| = 1 the chain rule gives u_r = U'(1) d|w|/dr, and U'(1) = -1/kappa.
    d|w|/dr is taken from the Mobius map by complex differentiation.
    """
    th = theta_grid(n_theta)
    z = np.exp(1j * th)
    z0 = complex(z0)
    # w = (z - z0) / (1 - conj(z0) z); |w| = 1 on the circle
    w = (z - z0) / (1.0 - np.conj(z0) * z)
    dw = (1.0 - abs(z0) ** 2) / (1.0 - np.conj(z0) * z) ** 2
    # d|w|/dr along the radial direction e^{i theta}: Re(conj(w) dw e^{i theta}) / |w|
    drho = np.real(np.conj(w) * dw * z) / np.abs(w)
    slope = float(graph_slope(kappa, 1.0, end=-1))
    u_r = slope * drho
    h = half_height_from_kappa(kappa)
    return EndTrace(BOTTOM, -h * np.ones(n_theta), u_r, np.zeros(n_theta))


def finite_radius_vertical_flux(kappa: float, radii) -> np.ndarray:
    """integral over the circle of radius rho of rho u_r / sqrt(1 + F u_r^2) for the top catenoid end."""
    rho = np.asarray(radii, dtype=float)
    s = graph_slope(kappa, rho, end=+1)
    F = (1.0 - rho ** 2) ** 2 / 4.0
    return 2.0 * np.pi * rho * s / np.sqrt(1.0 + F * s * s)
