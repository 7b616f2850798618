"""Minimal annuli near a catenoid as graphs along a modified normal field.

Chart.  The catenoid C_h is parametrized by (t, theta) in [-h, h] x S^1 as
X0 = (r(t) cos theta, r(t) sin theta, t) in disk-times-line coordinates.  Its
induced metric is lambda^2 r^2 (kappa^2 dt^2 + dtheta^2), so the chart is
conformal and the Dirichlet form of a function does not see the conformal
factor.  That is why the discrete Hessian stays nondegenerate up to t = +-h
once each row is divided by the cell area dt dtheta.

Field.  The unit normal in coordinate components is

    nu = (-c cos theta, -c sin theta, r' / (kappa r)),   c = (1 - r^2)^2 / (4 kappa r),

which tends to +E3 at the top and -E3 at the bottom.  The field n used for
the perturbation equals nu for |t| <= h - delta, equals +-E3 for
|t| >= h - delta/2 and is a quintic-smoothstep blend in between, normalized
in the metric at the node.  Perturbed surfaces are X0 + u n; in the vertical
region the perturbation is a pure height change, so end rows carry Dirichlet
data u(h) = gamma^+ - h, u(-h) = -(gamma^- + h).

Discretization.  Quads of the (t, theta) grid are split along both
diagonals with weight 1/2, and each triangle's area is computed with the
metric frozen at its centroid.  The residual is the gradient of this
discrete area minus its value at u = 0, so the catenoid is an exact
discrete solution and the Hessian at zero is the discrete Jacobi operator
of the modified field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, lsqr, spsolve

from . import _kernels
from .catenoid import CatenoidParams, CatenoidProfile, catenoid_params, profile as catenoid_profile
from .curves import CurvePair, theta_grid
from .errors import DomainError, NonConvergence, SingularLinearization
from .flux import BOTTOM, TOP, EndTrace, spectral_derivative

__all__ = [
    "AnnulusChart",
    "AnnulusSolution",
    "LinearizedOperator",
    "AnnulusOptions",
    "build_chart",
    "discrete_area",
    "area_gradient",
    "residual",
    "extension",
    "newton_solve",
    "linearization_at_zero",
    "near_kernel",
    "symmetric_basis",
    "end_traces",
    "membership_check",
]


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


@dataclass(frozen=True)
class AnnulusChart:
    params: CatenoidParams
    profile: CatenoidProfile
    n_theta: int
    blend_delta: float
    X0: np.ndarray  # (N, 3) node positions, row-major in (t, theta)
    nvec: np.ndarray  # (N, 3) the field n
    nu: np.ndarray  # (N, 3) unit normal of the catenoid (end rows: +-E3)
    J: np.ndarray  # (N,) g(n, nu)
    tri: np.ndarray
    weight: np.ndarray
    interior: np.ndarray
    top_row: np.ndarray
    bottom_row: np.ndarray

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def h(self) -> float:
        return self.params.h

    @property
    def n_t(self) -> int:
        return self.profile.n_nodes

    @property
    def t(self) -> np.ndarray:
        return self.profile.t

    @property
    def theta(self) -> np.ndarray:
        return theta_grid(self.n_theta)

    @property
    def n_nodes(self) -> int:
        return self.n_t * self.n_theta

    @property
    def cell(self) -> float:
        return self.profile.dt * 2.0 * math.pi / self.n_theta

    def grid(self, u) -> np.ndarray:
        return np.asarray(u).reshape(self.n_t, self.n_theta)

    def metric_norm(self, v) -> np.ndarray:
        """Length of coordinate vectors ``v`` (N, 3) at the nodes; end rows must be vertical."""
        rr = np.hypot(self.X0[:, 0], self.X0[:, 1])
        lam2 = 4.0 / np.where(rr < 1.0, 1.0 - rr ** 2, 1.0) ** 2
        return np.sqrt(lam2 * (v[:, 0] ** 2 + v[:, 1] ** 2) + v[:, 2] ** 2)


def build_chart(h: float | None = None, n_t: int = 97, n_theta: int = 96, blend_delta: float | None = None,
                kappa: float | None = None) -> AnnulusChart:
    """Chart over C_h with ``n_t`` rows in t (endpoints included) and ``n_theta`` columns."""
    params = catenoid_params(kappa=kappa) if h is None else catenoid_params(h=h)
    h = params.h
    if blend_delta is None:
        blend_delta = h / 8.0
    if not 0.0 < blend_delta < h / 4.0:
        raise DomainError(f"blend width must lie in (0, h/4), got {blend_delta}")
    if n_t < 9 or n_theta < 8:
        raise DomainError("chart needs n_t >= 9 and n_theta >= 8")
    prof = catenoid_profile(params.kappa, n_t)
    if prof.dt > blend_delta / 2.0:
        raise DomainError("grid too coarse: the two outermost rows must lie in the vertical region")
    kappa = params.kappa
    t, r, dr = prof.t, prof.r, prof.dr
    th = theta_grid(n_theta)
    T, TH = np.meshgrid(t, th, indexing="ij")
    R = np.repeat(r[:, None], n_theta, axis=1)
    DR = np.repeat(dr[:, None], n_theta, axis=1)
    X0 = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel(), T.ravel()])

    c = (1.0 - R ** 2) ** 2 / (4.0 * kappa * R)
    nu = np.stack([-c * np.cos(TH), -c * np.sin(TH), DR / (kappa * R)], axis=-1)
    sgn = np.sign(T)
    nu[0, :, :] = [0.0, 0.0, -1.0]
    nu[-1, :, :] = [0.0, 0.0, 1.0]
    vert = np.zeros_like(nu)
    vert[..., 2] = sgn
    s = _smoothstep((np.abs(T) - (h - blend_delta)) / (blend_delta / 2.0))[..., None]
    nb = (1.0 - s) * nu + s * vert
    # on the end rows R = 1 and the field is vertical; any finite lam2 will do there
    lam2 = 4.0 / np.where(R < 1.0, 1.0 - R ** 2, 1.0) ** 2
    norm = np.sqrt(lam2 * (nb[..., 0] ** 2 + nb[..., 1] ** 2) + nb[..., 2] ** 2)
    nb = nb / norm[..., None]
    full = s[..., 0] >= 1.0
    nb[full] = vert[full]
    J = lam2 * (nb[..., 0] * nu[..., 0] + nb[..., 1] * nu[..., 1]) + nb[..., 2] * nu[..., 2]
    J[full] = (vert[..., 2] * nu[..., 2])[full]

    nt, nth = n_t, n_theta
    idx = np.arange(nt * nth).reshape(nt, nth)
    a = idx[:-1, :].ravel()
    b = np.roll(idx, -1, axis=1)[:-1, :].ravel()
    cc = idx[1:, :].ravel()
    d = np.roll(idx, -1, axis=1)[1:, :].ravel()
    tri = np.ascontiguousarray(np.vstack([np.column_stack([a, cc, d]), np.column_stack([a, d, b]),
                                          np.column_stack([a, cc, b]), np.column_stack([b, cc, d])]),
                               dtype=np.int64)
    weight = np.full(len(tri), 0.5)
    interior = idx[1:-1, :].ravel()
    return AnnulusChart(params=params, profile=prof, n_theta=n_theta, blend_delta=float(blend_delta),
                        X0=np.ascontiguousarray(X0), nvec=np.ascontiguousarray(nb.reshape(-1, 3)),
                        nu=nu.reshape(-1, 3), J=J.ravel(), tri=tri, weight=weight, interior=interior,
                        top_row=idx[-1].copy(), bottom_row=idx[0].copy())


def _check_in_disk(chart: AnnulusChart, u):
    P = chart.X0[:, :2] + u[:, None] * chart.nvec[:, :2]
    rr = np.sum(P * P, axis=1)
    rows = np.ones(chart.n_nodes, dtype=bool)
    rows[chart.top_row] = rows[chart.bottom_row] = False
    if np.any(rr[rows] >= 1.0):
        raise DomainError("perturbed immersion leaves the disk")


def _assemble(chart: AnnulusChart, u, want_hessian):
    u = np.ascontiguousarray(u, dtype=float)
    _check_in_disk(chart, u)
    return _kernels.area_assemble(chart.X0, chart.nvec, u, chart.tri, chart.weight, want_hessian)


def discrete_area(chart: AnnulusChart, u) -> float:
    return _assemble(chart, u, False)[0]


def area_gradient(chart: AnnulusChart, u) -> np.ndarray:
    return _assemble(chart, u, False)[1]


def _base_gradient(chart: AnnulusChart) -> np.ndarray:
    g = chart.__dict__.get("_base_grad")
    if g is None:
        g = area_gradient(chart, np.zeros(chart.n_nodes))
        object.__setattr__(chart, "_base_grad", g)
    return g


def residual(chart: AnnulusChart, u) -> np.ndarray:
    """Scaled, base-corrected area gradient on interior rows, as an (n_t - 2, n_theta) array."""
    g = area_gradient(chart, u) - _base_gradient(chart)
    return (g[chart.interior] / chart.cell).reshape(chart.n_t - 2, chart.n_theta)


def _hessian(chart: AnnulusChart, u):
    _, g, hv = _assemble(chart, u, True)
    rows = np.repeat(chart.tri, 3, axis=1).ravel()
    cols = np.tile(chart.tri, (1, 3)).ravel()
    H = sp.csr_matrix((hv, (rows, cols)), shape=(chart.n_nodes, chart.n_nodes))
    return g, H


@dataclass
class LinearizedOperator:
    matrix: sp.csr_matrix  # scaled Hessian on interior nodes
    interior: np.ndarray
    scale: float  # the rows were divided by this cell area

    def asymmetry(self) -> float:
        d = self.matrix - self.matrix.T
        return float(abs(d).max() / abs(self.matrix).max())


def linearization_at_zero(chart: AnnulusChart) -> LinearizedOperator:
    _, H = _hessian(chart, np.zeros(chart.n_nodes))
    I = chart.interior
    return LinearizedOperator(matrix=(H[I][:, I] / chart.cell).tocsr(), interior=I, scale=chart.cell)


def symmetric_basis(chart: AnnulusChart, m: int) -> sp.csr_matrix:
    """Replication matrix from R_m-invariant interior values to all interior values."""
    if m < 1 or chart.n_theta % m:
        raise DomainError(f"n_theta={chart.n_theta} is not divisible by m={m}")
    period = chart.n_theta // m
    rows = np.arange((chart.n_t - 2) * chart.n_theta)
    i, j = np.divmod(rows, chart.n_theta)
    cols = i * period + j % period
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(rows), (chart.n_t - 2) * period))


def near_kernel(chart: AnnulusChart, k: int = 4, symmetry: int | None = None) -> np.ndarray:
    """The ``k`` smallest |eigenvalues| of the scaled interior linearization at zero."""
    L = linearization_at_zero(chart).matrix
    if symmetry is not None and symmetry > 1:
        P = symmetric_basis(chart, symmetry)
        # the basis is orthogonal with column norms sqrt(m); rescale to stay orthonormal
        L = (P.T @ L @ P) / symmetry
    vals = eigsh(L.tocsc(), k=k, sigma=0.0, which="LM", return_eigenvectors=False)
    return np.sort(np.abs(vals))


def extension(chart: AnnulusChart, top_values, bottom_values) -> np.ndarray:
    """Fill the chart from end-row data, mode by mode, with solutions of u_tt = kappa^2 k^2 u."""
    t, h, kappa = chart.t, chart.h, chart.kappa
    ct = np.fft.rfft(np.asarray(top_values, dtype=float))
    cb = np.fft.rfft(np.asarray(bottom_values, dtype=float))
    k = np.arange(len(ct))
    out = np.empty((len(t), len(k)), dtype=complex)
    even = 0.5 * (ct + cb)
    odd = 0.5 * (ct - cb)
    for kk in k:
        if kk == 0:
            e, o = np.ones_like(t), t / h
        else:
            w = kappa * kk
            # cosh(w t)/cosh(w h) written with decaying exponentials to avoid overflow
            e = (np.exp(w * (np.abs(t) - h)) + np.exp(-w * (np.abs(t) + h))) / (1.0 + np.exp(-2.0 * w * h))
            o = np.sign(t) * (np.exp(w * (np.abs(t) - h)) - np.exp(-w * (np.abs(t) + h))) / (1.0 - np.exp(-2.0 * w * h))
        out[:, kk] = even[kk] * e + odd[kk] * o
    return np.fft.irfft(out, chart.n_theta, axis=1).ravel()


def boundary_values(chart: AnnulusChart, pair: CurvePair):
    th = chart.theta
    return pair.top(th) - chart.h, -(pair.bottom(th) + chart.h)


@dataclass(frozen=True)
class AnnulusOptions:
    tol: float = 1e-10
    max_iter: int = 30
    armijo: float = 1e-4
    min_step: float = 1e-6
    step_tol: float = 1e-15
    sup_radius: float = 0.1
    # near-singular when the smallest |eigenvalue| is below this fraction of the fourth smallest
    singular_tol: float = 0.05
    allow_lstsq: bool = False


@dataclass
class AnnulusSolution:
    chart: AnnulusChart
    u: np.ndarray
    residual_norm: float
    history: list
    top: EndTrace
    bottom: EndTrace
    symmetry: int | None = None
    iterations: int = 0
    notes: list = field(default_factory=list)

    def immersion(self) -> np.ndarray:
        return self.chart.X0 + self.u[:, None] * self.chart.nvec

    def newton_ratios(self) -> list:
        """log(r_{k+1}) / log(r_k) for successive residuals; close to 2 in the quadratic regime."""
        h = [x for x in self.history if x > 0]
        return [math.log(h[i + 1]) / math.log(h[i]) for i in range(len(h) - 1) if 0 < h[i] < 1]

    def summary(self) -> dict:
        return {
            "kappa": self.chart.kappa,
            "h": self.chart.h,
            "n_t": self.chart.n_t,
            "n_theta": self.chart.n_theta,
            "blend_delta": self.chart.blend_delta,
            "symmetry": self.symmetry,
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "residual_history": list(self.history),
            "sup_u": float(np.max(np.abs(self.u))),
            "notes": list(self.notes),
        }


def newton_solve(chart: AnnulusChart, pair: CurvePair, symmetry: int | None = None,
                 opts: AnnulusOptions | None = None) -> AnnulusSolution:
    """Solve for the minimal annulus bounded by ``pair`` as a graph over the chart.

    With ``symmetry=m`` (m >= 2) the Newton systems are restricted to
    R_m-invariant functions, where the linearization is invertible.  Without
    symmetry a near-singular linearization raises SingularLinearization
    unless ``opts.allow_lstsq`` asks for a least-squares step.
    """
    opts = opts or AnnulusOptions()
    top_v, bot_v = boundary_values(chart, pair)
    dev = max(np.max(np.abs(top_v)), np.max(np.abs(bot_v)))
    if dev > opts.sup_radius:
        raise DomainError(f"boundary curves deviate {dev:.3g} from the catenoid, beyond {opts.sup_radius}")
    P = None
    if symmetry is not None and symmetry > 1:
        if not pair.symmetric_under(symmetry):
            raise DomainError(f"boundary curves are not invariant under R_{symmetry}")
        P = symmetric_basis(chart, symmetry)

    u = extension(chart, top_v, bot_v)
    if P is not None:
        # the extension is invariant already; project to remove round-off
        period = chart.n_theta // symmetry
        ug = chart.grid(u)
        ug[:] = np.tile(ug[:, :period], (1, symmetry))
        u = ug.ravel()
    u = np.ascontiguousarray(u)
    I = chart.interior
    notes = []

    def scaled_residual(v):
        g = area_gradient(chart, v) - _base_gradient(chart)
        return g[I] / chart.cell

    res = scaled_residual(u)
    rnorm = float(np.max(np.abs(res)))
    history = [rnorm]
    it = 0
    while rnorm > opts.tol:
        if it >= opts.max_iter:
            raise NonConvergence(f"annulus Newton stalled at residual {rnorm:.3e}", history=history)
        _, H = _hessian(chart, u)
        A = (H[I][:, I] / chart.cell).tocsc()
        if P is not None:
            Ar = (P.T @ A @ P).tocsc()
            step_i = -P @ spsolve(Ar, P.T @ res)
        else:
            sv = eigsh(A, k=4, sigma=0.0, which="LM", return_eigenvectors=False)
            sv = np.sort(np.abs(sv))
            if sv[0] < opts.singular_tol * sv[-1]:
                if not opts.allow_lstsq:
                    raise SingularLinearization(
                        f"linearization is near-singular (smallest |eigenvalues| {sv[:2]})", singular_values=sv)
                notes.append(f"least-squares step at iteration {it}, smallest |eigenvalue| {sv[0]:.3e}")
                step_i = -lsqr(A, res, atol=1e-14, btol=1e-14)[0]
            else:
                step_i = -spsolve(A, res)
        if np.max(np.abs(step_i)) <= opts.step_tol * max(1.0, float(np.max(np.abs(u)))):
            break
        step = np.zeros_like(u)
        step[I] = step_i
        alpha = 1.0
        while True:
            trial = u + alpha * step
            try:
                r_t = scaled_residual(trial)
                n_t = float(np.max(np.abs(r_t)))
            except DomainError:
                n_t = math.inf
            if n_t <= (1.0 - opts.armijo * alpha) * rnorm or n_t <= opts.tol:
                break
            alpha *= 0.5
            if alpha < opts.min_step:
                raise NonConvergence("annulus line search failed", history=history)
        u, res, rnorm = trial, r_t, n_t
        history.append(rnorm)
        it += 1

    top, bottom = end_traces(chart, u)
    return AnnulusSolution(chart=chart, u=u, residual_norm=rnorm, history=history, top=top, bottom=bottom,
                           symmetry=symmetry, iterations=it, notes=notes)


def _edge_slope(rho, T):
    """dT/drho at rho[0] from the quadratic through three points (rho_k, T_k)."""
    x0, x1, x2 = rho
    y0, y1, y2 = T
    return (y0 * (2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (x0 - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (x0 - x1) / ((x2 - x0) * (x2 - x1)))


def _raw_slopes(chart: AnnulusChart, u):
    P = chart.X0 + np.asarray(u)[:, None] * chart.nvec
    rho = chart.grid(np.hypot(P[:, 0], P[:, 1]))
    T = chart.grid(P[:, 2])
    out = {}
    for end, rows in ((TOP, [-1, -2, -3]), (BOTTOM, [0, 1, 2])):
        out[end] = (T[rows[0]].copy(), _edge_slope([rho[k] for k in rows], [T[k] for k in rows]))
    return out


def end_traces(chart: AnnulusChart, u, base_corrected: bool = True) -> tuple:
    """End traces (u, u_r, u_theta) at r = 1 of the surface X0 + u n.

    Near each end the surface is the vertical graph of its height T over the
    disk radius rho; along each theta the displaced points keep their angle
    (n has no angular component), so u_r = dT/drho at rho = 1 comes from the
    quadratic through the last three rows.  With ``base_corrected`` the
    stencil error of the catenoid itself is removed, using its exact
    slopes +-1/kappa, in the same way the residual subtracts the base gradient.
    """
    raw = _raw_slopes(chart, u)
    if base_corrected:
        base = chart.__dict__.get("_base_slopes")
        if base is None:
            base = _raw_slopes(chart, np.zeros(chart.n_nodes))
            object.__setattr__(chart, "_base_slopes", base)
    out = []
    for end, sign in ((TOP, 1.0), (BOTTOM, -1.0)):
        val, ur = raw[end]
        if base_corrected:
            ur = ur - base[end][1] + sign / chart.kappa
        out.append(EndTrace(end, val, ur, spectral_derivative(val)))
    return tuple(out)


def membership_check(bottom_u_r, disk_v_r) -> bool:
    """Strict inequality u^-_r < v^-_r at every theta sample."""
    diff = np.asarray(bottom_u_r, dtype=float) - np.asarray(disk_v_r, dtype=float)
    return bool(np.all(diff < 0.0))
