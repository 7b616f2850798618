"""Paired tall rectangles are not area-minimizing.

Upper half-plane model, coordinates (x, y, t).  The upper half of the tall
rectangle over the geodesics through (0, 0) and infinity is

    phi(rho, theta) = (rho cos theta, rho sin theta, lambda(theta)),
    lambda(theta) = integral_theta^theta0 d csc s / sqrt(csc^2 s - d^2) ds,

with d > 1 and csc theta0 = d.  Cutting at the geodesics of radii r and 1/r
and at heights +-lambda(theta) gives a disk Sigma_1 whose area A1 is compared
with the competitor D_1 (horizontal sector, area A2) plus a vertical strip
B_1 (area below A3).  With r = tan^n(theta/2) the ratio f = A1 / (A2 + A3)
tends to 1 as theta -> 0 with slope F(theta0|d^2) - E(theta0|d^2) - lambda(0)/n,
so f > 1 at small theta once n is large enough.

All integrals are computed by adaptive quadrature on integrands made smooth
by the substitution sin(psi) = sqrt(m) sin(s); every value carries the
quadrature's error estimate so a witness f > 1 can be certified.

Note that F here is the incomplete elliptic integral of the first kind,
unrelated to the disk metric factor elsewhere in the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NoWitness, NumericsError

__all__ = [
    "TallRectParams",
    "EllipticValue",
    "Witness",
    "elliptic_E",
    "elliptic_F",
    "lambda_profile",
    "lambda_derivative",
    "height",
    "area_sigma1",
    "area_D1",
    "area_B1_bound",
    "ratio_f",
    "slope_at_zero",
    "min_exponent",
    "verify_not_minimizing",
    "sigma1_area_by_quadrature",
    "D1_area_by_quadrature",
    "mesh",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TallRectParams:
    d: float
    n: int = 1

    def __post_init__(self):
        if not (self.d > 1.0 and math.isfinite(self.d)):
            raise DomainError(f"d must exceed 1, got {self.d}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")

    @property
    def theta0(self) -> float:
        return math.asin(1.0 / self.d)

    @property
    def m(self) -> float:
        return self.d * self.d


@dataclass(frozen=True)
class EllipticValue:
    phi: float
    m: float
    value: float
    error: float


def _quad(f, a, b, tol):
    val, err = quad(f, a, b, epsabs=tol, epsrel=0.0, limit=200)
    if not err <= tol:
        raise NumericsError(f"quadrature error {err:.3e} exceeds {tol:.3e}", estimate=err)
    # the estimate can be optimistic at the round-off level; never claim less than a few ulps
    return val, max(err, 8 * _EPS * max(1.0, abs(val)))


def _elliptic(phi: float, m: float, kind: str, tol: float) -> EllipticValue:
    phi = float(phi)
    m = float(m)
    if phi < 0:
        v = _elliptic(-phi, m, kind, tol)
        return EllipticValue(phi, m, -v.value, v.error)
    if m > 1.0:
        if math.sin(min(phi, math.pi / 2)) ** 2 * m > 1.0 + 1e-15 or phi > math.pi / 2:
            raise DomainError(f"radicand 1 - m sin^2 is negative on [0, {phi}] for m = {m}")
        # sin(psi) = sqrt(m) sin(s) turns the endpoint square root into a smooth integrand
        k = math.sqrt(m)
        psi_end = math.asin(min(1.0, k * math.sin(phi)))
        if kind == "F":
            f = lambda p: 1.0 / (k * math.sqrt(1.0 - math.sin(p) ** 2 / m))
        else:
            f = lambda p: math.cos(p) ** 2 / (k * math.sqrt(1.0 - math.sin(p) ** 2 / m))
        val, err = _quad(f, 0.0, psi_end, tol)
        return EllipticValue(phi, m, val, err)
    if kind == "F" and m == 1.0 and phi >= math.pi / 2:
        raise DomainError("F(phi|1) diverges at phi = pi/2")
    if kind == "F":
        f = lambda s: 1.0 / math.sqrt(1.0 - m * math.sin(s) ** 2)
    else:
        f = lambda s: math.sqrt(max(0.0, 1.0 - m * math.sin(s) ** 2))
    val, err = _quad(f, 0.0, phi, tol)
    return EllipticValue(phi, m, val, err)


def elliptic_E(phi: float, m: float, tol: float = 1e-13) -> EllipticValue:
    """E(phi|m) = integral_0^phi sqrt(1 - m sin^2 s) ds."""
    return _elliptic(phi, m, "E", tol)


def elliptic_F(phi: float, m: float, tol: float = 1e-13) -> EllipticValue:
    """F(phi|m) = integral_0^phi ds / sqrt(1 - m sin^2 s)."""
    return _elliptic(phi, m, "F", tol)


def lambda_profile(params: TallRectParams, theta: float, tol: float = 1e-13) -> EllipticValue:
    """lambda(theta) with its error bound, returned as an EllipticValue for uniformity.

    With sin(psi) = d sin(s) the integrand becomes 1 / sqrt(1 - sin^2(psi) / d^2)
    on [arcsin(d sin theta), pi/2].
    """
    d = params.d
    if not 0.0 <= theta <= params.theta0:
        raise DomainError(f"theta must lie in [0, theta0={params.theta0}], got {theta}")
    psi0 = math.asin(min(1.0, d * math.sin(theta)))
    f = lambda p: 1.0 / math.sqrt(1.0 - (math.sin(p) / d) ** 2)
    val, err = _quad(f, psi0, math.pi / 2, tol)
    return EllipticValue(theta, params.m, val, err)


def lambda_derivative(params: TallRectParams, theta):
    """lambda'(theta) = -d csc(theta) / sqrt(csc^2(theta) - d^2)."""
    theta = np.asarray(theta, dtype=float)
    return -params.d / np.sqrt(1.0 - (params.d * np.sin(theta)) ** 2)


def height(params: TallRectParams, tol: float = 1e-13) -> EllipticValue:
    """Full height 2 lambda(0) of the tall rectangle."""
    v = lambda_profile(params, 0.0, tol)
    return EllipticValue(0.0, params.m, 2.0 * v.value, 2.0 * v.error)


def _G(params: TallRectParams, theta: float, tol: float):
    """cot(theta) sqrt(1 - d^2 sin^2 theta) + E(theta|d^2) - F(theta|d^2) and its error."""
    E = elliptic_E(theta, params.m, tol)
    F = elliptic_F(theta, params.m, tol)
    root = math.sqrt(max(0.0, 1.0 - params.m * math.sin(theta) ** 2))
    lead = root / math.tan(theta) if theta > 0 else math.inf
    val = lead + E.value - F.value
    return val, E.error + F.error + 4 * _EPS * (abs(lead) + abs(E.value) + abs(F.value))


def _check_window(params, r, theta):
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    if not 0.0 < theta <= params.theta0:
        raise DomainError(f"theta must lie in (0, theta0], got {theta}")


def area_sigma1(r: float, theta: float, params: TallRectParams, tol: float = 1e-13) -> EllipticValue:
    """Closed-form area of Sigma_1: -4 log(r) (G(theta) - G(theta0))."""
    _check_window(params, r, theta)
    g, eg = _G(params, theta, tol)
    g0, eg0 = _G(params, params.theta0, tol)
    scale = -4.0 * math.log(r)
    return EllipticValue(theta, params.m, scale * (g - g0), abs(scale) * (eg + eg0))


def area_D1(r: float, theta: float) -> float:
    """Area of the horizontal sector D_1: -4 log(r) cot(theta)."""
    if not 0.0 < r < 1.0 or not 0.0 < theta < math.pi / 2:
        raise DomainError("need 0 < r < 1 and 0 < theta < pi/2")
    return -4.0 * math.log(r) / math.tan(theta)


def area_B1_bound(theta: float, params: TallRectParams, tol: float = 1e-13) -> EllipticValue:
    """Upper bound 2 lambda(0) log(cot^2(theta/2)) for the area of B_1."""
    if not 0.0 < theta <= math.pi / 2:
        raise DomainError("theta must lie in (0, pi/2]")
    lam0 = lambda_profile(params, 0.0, tol)
    c = 2.0 * math.log(1.0 / math.tan(theta / 2.0))
    return EllipticValue(theta, params.m, 2.0 * lam0.value * c, 2.0 * lam0.error * abs(c))


def ratio_f(theta: float, params: TallRectParams, tol: float = 1e-13) -> EllipticValue:
    """f(theta) = A1 / (A2 + A3) with r = tan^n(theta/2), and a first-order error bound.

    log r = n log tan(theta/2) is used directly, so tiny r does not underflow;
    the common factor -4 log tan(theta/2) cancels.
    """
    if not 0.0 < theta < params.theta0:
        raise DomainError(f"theta must lie in (0, theta0), got {theta}")
    n = params.n
    g, eg = _G(params, theta, tol)
    g0, eg0 = _G(params, params.theta0, tol)
    lam0 = lambda_profile(params, 0.0, tol)
    num = n * (g - g0)
    den = n / math.tan(theta) + lam0.value
    f = num / den
    err = (n * (eg + eg0)) / den + abs(f) * lam0.error / den + 8 * _EPS * abs(f)
    return EllipticValue(theta, params.m, f, err)


def slope_at_zero(params: TallRectParams, tol: float = 1e-13) -> float:
    """lim f'(theta) as theta -> 0: F(theta0|d^2) - E(theta0|d^2) - lambda(0)/n."""
    F0 = elliptic_F(params.theta0, params.m, tol).value
    E0 = elliptic_E(params.theta0, params.m, tol).value
    lam0 = lambda_profile(params, 0.0, tol).value
    return F0 - E0 - lam0 / params.n


def min_exponent(d: float, n_max: int = 200, tol: float = 1e-13) -> int:
    """Smallest n in 1..n_max with positive limiting slope."""
    for n in range(1, n_max + 1):
        if slope_at_zero(TallRectParams(d, n), tol) > 0:
            return n
    raise NoWitness(f"no exponent up to {n_max} gives a positive slope for d={d}")


@dataclass
class Witness:
    d: float
    n: int
    theta_star: float
    f_value: float
    error_bound: float
    slope: float
    scanned: list = field(default_factory=list)

    @property
    def margin(self) -> float:
        return self.f_value - 1.0 - self.error_bound

    @property
    def certified(self) -> bool:
        return self.margin > 0.0

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "theta_star": self.theta_star, "f_value": self.f_value,
                "error_bound": self.error_bound, "margin": self.margin, "slope": self.slope,
                "certified": self.certified}


def verify_not_minimizing(d: float, tol: float = 1e-13, n_max: int = 200, n_theta: int = 120) -> Witness:
    """Find (n, theta*) with f(theta*) - error bound > 1.

    Exponents are tried from the smallest one with positive slope upward;
    for each, f is scanned on a log-spaced theta grid in (0, theta0) and the
    sample with the largest certified margin is kept.
    """
    n0 = min_exponent(d, n_max, tol)
    theta0 = TallRectParams(d).theta0
    grid = np.geomspace(1e-4 * theta0, 0.95 * theta0, n_theta)
    tried = []
    for n in range(n0, n_max + 1):
        params = TallRectParams(d, n)
        best = None
        for th in grid:
            v = ratio_f(float(th), params, tol)
            margin = v.value - 1.0 - v.error
            if best is None or margin > best[0]:
                best = (margin, float(th), v)
        tried.append({"n": n, "best_margin": best[0]})
        if best[0] > 0:
            _, th, v = best
            return Witness(d=d, n=n, theta_star=th, f_value=v.value, error_bound=v.error,
                           slope=slope_at_zero(params, tol), scanned=tried)
    raise NoWitness(f"no certified witness for d={d} with n <= {n_max}")


# independent area quadratures in the half-plane metric (dx^2 + dy^2) / y^2 + dt^2

def sigma1_area_by_quadrature(r: float, theta: float, params: TallRectParams, tol: float = 1e-11) -> float:
    """Area of Sigma_1 from the first fundamental form of phi(rho, theta), both halves.

    phi_rho = (cos, sin, 0) and phi_theta = (-rho sin, rho cos, lambda'), so with
    y = rho sin(theta): E = 1/y^2, F = 0, G = rho^2 / y^2 + lambda'^2.  lambda'
    blows up like (theta0 - theta)^(-1/2), which the algebraic weight absorbs.
    """
    _check_window(params, r, theta)
    th0 = params.theta0

    def inner(rho):
        def g(th):
            # (theta0 - th) lambda'^2 = x / (sin(x) sin(theta0 + th)) with x = theta0 - th,
            # using 1 - d^2 sin^2 th = d^2 sin(x) sin(theta0 + th); finite at x = 0
            x = max(th0 - th, 0.0)
            y = rho * math.sin(th)
            ratio = 1.0 if x == 0.0 else x / math.sin(x)
            lp2x = ratio / math.sin(th0 + th)
            return math.sqrt(rho * rho * x / y ** 2 + lp2x) / y

        val, _ = quad(g, theta, th0, weight="alg", wvar=(0.0, -0.5), epsabs=tol, epsrel=tol, limit=200)
        return val

    val, _ = quad(inner, r, 1.0 / r, epsabs=tol, epsrel=tol, limit=200)
    return 2.0 * val


def D1_area_by_quadrature(r: float, theta: float, tol: float = 1e-11) -> float:
    """Area of {u e^{iv}: r < u < 1/r, theta < v < pi - theta} with density 1/y^2."""
    def inner(u):
        val, _ = quad(lambda v: u / (u * math.sin(v)) ** 2, theta, math.pi - theta, epsabs=tol, epsrel=tol)
        return val

    val, _ = quad(inner, r, 1.0 / r, epsabs=tol, epsrel=tol)
    return val


def mesh(params: TallRectParams, r_range=(0.5, 2.0), n_r: int = 16, n_theta: int = 32, theta_min: float = 1e-3):
    """Vertices and triangles of the tall rectangle in half-plane coordinates (x, y, t).

    The upper half phi(rho, theta) and its mirror t -> -t share the seam
    row theta = theta0 (height 0).  Returns (vertices (V, 3), faces (F, 3)).
    """
    r0, r1 = r_range
    if not 0.0 < r0 < r1:
        raise DomainError("r_range must be increasing and positive")
    rho = np.geomspace(r0, r1, n_r)
    th = np.linspace(theta_min, params.theta0, n_theta)
    lam = np.array([lambda_profile(params, float(x)).value for x in th[:-1]] + [0.0])
    # upper rows run theta_min..theta0; lower rows reuse the seam and go back out
    rows_t = np.concatenate([lam, -lam[-2::-1]])
    rows_th = np.concatenate([th, th[-2::-1]])
    R, TH = np.meshgrid(rho, rows_th, indexing="ij")
    T = np.broadcast_to(rows_t, R.shape)
    verts = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel(), T.ravel()])
    nrow = len(rows_th)
    idx = np.arange(n_r * nrow).reshape(n_r, nrow)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, e = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    faces = np.vstack([np.column_stack([a, b, c]), np.column_stack([a, c, e])])
    return verts, faces
