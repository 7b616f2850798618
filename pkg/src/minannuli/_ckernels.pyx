# cython: language_level=3
"""Compiled assembly kernels; see ``_pykernels`` for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)

cdef double CSTEP = 1e-30


def sturm_count(double[::1] diag, double[::1] off, double x):
    cdef Py_ssize_t k, n = diag.shape[0]
    cdef double d, tiny = np.finfo(float).tiny
    cdef int count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    for k in range(1, n):
        if d == 0.0:
            d = tiny
        d = (diag[k] - x) - off[k - 1] * off[k - 1] / d
        if d < 0:
            count += 1
    return count


def graph_assemble(double[::1] u, long[:, ::1] tri, double[:, :, ::1] grads,
                   double[::1] area, double[::1] F):
    cdef Py_ssize_t t, k, l, T = tri.shape[0]
    cdef double gx, gy, q, root, a, energy = 0.0, c1, c2
    cdef double gk[3]
    res_arr = np.zeros(u.shape[0])
    hess_arr = np.empty(T * 9)
    cdef double[::1] res = res_arr
    cdef double[::1] hess = hess_arr
    for t in range(T):
        gx = 0.0
        gy = 0.0
        for k in range(3):
            gx += u[tri[t, k]] * grads[t, k, 0]
            gy += u[tri[t, k]] * grads[t, k, 1]
        q = gx * gx + gy * gy
        root = sqrt(1.0 + F[t] * q)
        energy += area[t] * q / (root + 1.0)
        a = 1.0 / root
        c1 = area[t] * a
        c2 = area[t] * F[t] * a * a * a
        for k in range(3):
            gk[k] = gx * grads[t, k, 0] + gy * grads[t, k, 1]
            res[tri[t, k]] += c1 * gk[k]
        for k in range(3):
            for l in range(3):
                hess[9 * t + 3 * k + l] = c1 * (grads[t, k, 0] * grads[t, l, 0] + grads[t, k, 1] * grads[t, l, 1]) - c2 * gk[k] * gk[l]
    return energy, res_arr, hess_arr


cdef double complex local_area(double complex[3][3] P, double[3][3] n, double w,
                               double complex[3] g) noexcept nogil:
    cdef double complex e1[3]
    cdef double complex e2[3]
    cdef double complex Ge1[3]
    cdef double complex Ge2[3]
    cdef double complex cx, cy, s, mu, dmx, dmy, ah, bh, ch, A, B, C, D, root, dDmu, scale
    cdef double complex d1, d2, m
    cdef int i, k
    for i in range(3):
        e1[i] = P[1][i] - P[0][i]
        e2[i] = P[2][i] - P[0][i]
    cx = (P[0][0] + P[1][0] + P[2][0]) / 3.0
    cy = (P[0][1] + P[1][1] + P[2][1]) / 3.0
    s = 1.0 - cx * cx - cy * cy
    mu = 4.0 / (s * s)
    dmx = 16.0 * cx / (s * s * s) / 3.0
    dmy = 16.0 * cy / (s * s * s) / 3.0
    ah = e1[0] * e1[0] + e1[1] * e1[1]
    bh = e2[0] * e2[0] + e2[1] * e2[1]
    ch = e1[0] * e2[0] + e1[1] * e2[1]
    A = mu * ah + e1[2] * e1[2]
    B = mu * bh + e2[2] * e2[2]
    C = mu * ch + e1[2] * e2[2]
    D = A * B - C * C
    root = csqrt(D)
    for i in range(2):
        Ge1[i] = mu * e1[i]
        Ge2[i] = mu * e2[i]
    Ge1[2] = e1[2]
    Ge2[2] = e2[2]
    dDmu = ah * B + A * bh - 2.0 * C * ch
    scale = w / (4.0 * root)
    for k in range(3):
        g[k] = 0.0
    for i in range(3):
        d1 = 2.0 * B * Ge1[i] - 2.0 * C * Ge2[i]
        d2 = 2.0 * A * Ge2[i] - 2.0 * C * Ge1[i]
        if i == 0:
            m = dDmu * dmx
        elif i == 1:
            m = dDmu * dmy
        else:
            m = 0.0
        g[0] += scale * (-d1 - d2 + m) * n[0][i]
        g[1] += scale * (d1 + m) * n[1][i]
        g[2] += scale * (d2 + m) * n[2][i]
    return 0.5 * w * root


def area_assemble(double[:, ::1] X0, double[:, ::1] nvec, double[::1] u,
                  long[:, ::1] tri, double[::1] weight, bint want_hessian=True):
    cdef Py_ssize_t t, i, k, j, T = tri.shape[0]
    cdef double complex P[3][3]
    cdef double complex Pc[3][3]
    cdef double n[3][3]
    cdef double complex g[3]
    cdef double complex gc[3]
    cdef double energy = 0.0
    grad_arr = np.zeros(u.shape[0])
    cdef double[::1] grad = grad_arr
    cdef double[::1] hess
    if want_hessian:
        hess_arr = np.empty(T * 9)
        hess = hess_arr
    else:
        hess_arr = None
    for t in range(T):
        for k in range(3):
            for i in range(3):
                n[k][i] = nvec[tri[t, k], i]
                P[k][i] = X0[tri[t, k], i] + u[tri[t, k]] * n[k][i]
        energy += local_area(P, n, weight[t], g).real
        for k in range(3):
            grad[tri[t, k]] += g[k].real
        if want_hessian:
            for k in range(3):
                for j in range(3):
                    for i in range(3):
                        Pc[j][i] = P[j][i]
                for i in range(3):
                    Pc[k][i] = P[k][i] + 1j * CSTEP * n[k][i]
                local_area(Pc, n, weight[t], gc)
                for j in range(3):
                    hess[9 * t + 3 * j + k] = gc[j].imag / CSTEP
    return energy, grad_arr, hess_arr
