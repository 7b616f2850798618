"""Reference numpy implementations of the assembly kernels.

These are the fallbacks used when the compiled ``_ckernels`` extension is
not available.  Both implementations must agree to round-off; the test
suite checks that.
"""
import numpy as np

_CSTEP = 1e-30


def sturm_count(diag, off, x):
    """Number of eigenvalues below ``x`` of the symmetric tridiagonal (diag, off)."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    tiny = np.finfo(float).tiny
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    for k in range(1, len(diag)):
        if d == 0.0:
            d = tiny
        d = (diag[k] - x) - off[k - 1] * off[k - 1] / d
        if d < 0:
            count += 1
    return count


def graph_assemble(u, tri, grads, area, F):
    """Energy, gradient and Hessian values of the discrete graph-area functional.

    ``tri`` (T,3) node indices, ``grads`` (T,3,2) gradients of the P1 basis,
    ``area`` (T,) weighted triangle areas, ``F`` (T,) metric factor at the
    centroid.  The energy is sum |T| (sqrt(1 + F|grad u|^2) - 1) / F.
    Returns (energy, residual (N,), hessian values (T*9,)) with Hessian
    entries ordered row-major per triangle.
    """
    ut = u[tri]
    g = np.einsum("tk,tkd->td", ut, grads)
    q = np.einsum("td,td->t", g, g)
    root = np.sqrt(1.0 + F * q)
    energy = float(np.sum(area * q / (root + 1.0)))
    a = 1.0 / root
    gk = np.einsum("td,tkd->tk", g, grads)
    res_local = (area * a)[:, None] * gk
    res = np.zeros(u.shape[0])
    np.add.at(res, tri.ravel(), res_local.ravel())
    gg = np.einsum("tkd,tld->tkl", grads, grads)
    hess = (area * a)[:, None, None] * gg - (area * F * a ** 3)[:, None, None] * gk[:, :, None] * gk[:, None, :]
    return energy, res, hess.reshape(-1)


def _local_area(P0, P1, P2, n0, n1, n2, w):
    """Triangle area in the metric lambda^2(dx^2+dy^2) + dt^2 frozen at the centroid,
    and its derivative with respect to displacements along n0, n1, n2.

    Works on real or complex arrays of shape (T,3).
    """
    e1 = P1 - P0
    e2 = P2 - P0
    cx = (P0[:, 0] + P1[:, 0] + P2[:, 0]) / 3.0
    cy = (P0[:, 1] + P1[:, 1] + P2[:, 1]) / 3.0
    s = 1.0 - cx * cx - cy * cy
    mu = 4.0 / (s * s)
    dmu_x = 16.0 * cx / (s * s * s) / 3.0
    dmu_y = 16.0 * cy / (s * s * s) / 3.0
    ah = e1[:, 0] * e1[:, 0] + e1[:, 1] * e1[:, 1]
    bh = e2[:, 0] * e2[:, 0] + e2[:, 1] * e2[:, 1]
    ch = e1[:, 0] * e2[:, 0] + e1[:, 1] * e2[:, 1]
    A = mu * ah + e1[:, 2] * e1[:, 2]
    B = mu * bh + e2[:, 2] * e2[:, 2]
    C = mu * ch + e1[:, 2] * e2[:, 2]
    D = A * B - C * C
    root = np.sqrt(D)
    energy = 0.5 * w * root
    # G e1, G e2
    Ge1 = np.stack([mu * e1[:, 0], mu * e1[:, 1], e1[:, 2]], axis=1)
    Ge2 = np.stack([mu * e2[:, 0], mu * e2[:, 1], e2[:, 2]], axis=1)
    dDe1 = 2.0 * B[:, None] * Ge1 - 2.0 * C[:, None] * Ge2
    dDe2 = 2.0 * A[:, None] * Ge2 - 2.0 * C[:, None] * Ge1
    dDmu = ah * B + A * bh - 2.0 * C * ch
    muterm = np.stack([dDmu * dmu_x, dDmu * dmu_y, np.zeros_like(dDmu)], axis=1)
    dP0 = -dDe1 - dDe2 + muterm
    dP1 = dDe1 + muterm
    dP2 = dDe2 + muterm
    scale = w / (4.0 * root)
    g0 = scale * np.sum(dP0 * n0, axis=1)
    g1 = scale * np.sum(dP1 * n1, axis=1)
    g2 = scale * np.sum(dP2 * n2, axis=1)
    return energy, np.stack([g0, g1, g2], axis=1)


def area_assemble(X0, nvec, u, tri, weight, want_hessian=True):
    """Discrete area of the immersion X0 + u * nvec over a weighted triangulation.

    Returns (area, gradient (N,), hessian values (T*9,) or None).  Hessian
    entries come from complex-step differentiation of the analytic gradient.
    """
    i0, i1, i2 = tri[:, 0], tri[:, 1], tri[:, 2]
    n0, n1, n2 = nvec[i0], nvec[i1], nvec[i2]
    P0 = X0[i0] + u[i0, None] * n0
    P1 = X0[i1] + u[i1, None] * n1
    P2 = X0[i2] + u[i2, None] * n2
    energy, g = _local_area(P0, P1, P2, n0, n1, n2, weight)
    grad = np.zeros(u.shape[0])
    np.add.at(grad, tri.ravel(), g.ravel())
    if not want_hessian:
        return float(np.sum(energy)), grad, None
    T = tri.shape[0]
    hess = np.empty((T, 3, 3))
    P = [P0.astype(complex), P1.astype(complex), P2.astype(complex)]
    nn = (n0, n1, n2)
    for k in range(3):
        Pk = list(P)
        Pk[k] = P[k] + 1j * _CSTEP * nn[k]
        _, gc = _local_area(Pk[0], Pk[1], Pk[2], n0, n1, n2, weight)
        hess[:, :, k] = gc.imag / _CSTEP
    return float(np.sum(energy)), grad, hess.reshape(-1)
