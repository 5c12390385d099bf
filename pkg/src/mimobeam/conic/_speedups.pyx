# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled cone kernels for nonnegative and second-order blocks.

Drop-in twin of ``kernels_py`` for layouts without PSD blocks; selected at
import time by ``backend``.  The formulas are identical to the pure-Python
module; only the loop execution differs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

from .kernels_py import Scaling

cnp.import_array()

KIND_NONNEG = 0
KIND_SOC = 1
KIND_PSD = 2

cdef int C_NONNEG = 0
cdef int C_SOC = 1


def identity(layout):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    e_arr = np.zeros(layout.slots)
    cdef double[:] e = e_arr
    cdef Py_ssize_t kb, i, off, dim
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                e[off + i] = 1.0
        else:
            e[off] = 1.0
    return e_arr


def compute_scaling(layout, x_arr, z_arr):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] x = np.ascontiguousarray(x_arr)
    cdef double[:] z = np.ascontiguousarray(z_arr)
    w_arr = np.zeros(layout.slots)
    eta_arr = np.zeros(kinds.shape[0])
    lam_arr = np.zeros(layout.slots)
    cdef double[:] w = w_arr
    cdef double[:] eta = eta_arr
    cdef double[:] lam = lam_arr
    cdef Py_ssize_t kb, i, off, dim
    cdef double nx1, nz1, res_x, res_z, a, bz, gamma, dot, wb0, scale
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                w[off + i] = sqrt(x[off + i] / z[off + i])
                lam[off + i] = sqrt(x[off + i] * z[off + i])
        else:
            nx1 = 0.0
            nz1 = 0.0
            for i in range(1, dim):
                nx1 += x[off + i] * x[off + i]
                nz1 += z[off + i] * z[off + i]
            nx1 = sqrt(nx1)
            nz1 = sqrt(nz1)
            res_x = (x[off] - nx1) * (x[off] + nx1)
            res_z = (z[off] - nz1) * (z[off] + nz1)
            if res_x <= 0.0 or res_z <= 0.0:
                raise FloatingPointError(
                    "second-order iterate left the cone")
            a = sqrt(res_x)
            bz = sqrt(res_z)
            dot = 0.0
            for i in range(dim):
                dot += (x[off + i] / a) * (z[off + i] / bz)
            gamma = sqrt((1.0 + dot) / 2.0)
            w[off] = (x[off] / a + z[off] / bz) / (2.0 * gamma)
            for i in range(1, dim):
                w[off + i] = (x[off + i] / a - z[off + i] / bz) \
                    / (2.0 * gamma)
            eta[kb] = sqrt(a / bz)
            # lam = W z
            dot = 0.0
            for i in range(1, dim):
                dot += w[off + i] * z[off + i]
            wb0 = w[off]
            lam[off] = eta[kb] * (wb0 * z[off] + dot)
            scale = z[off] + dot / (1.0 + wb0)
            for i in range(1, dim):
                lam[off + i] = eta[kb] * (z[off + i] + scale * w[off + i])
    return Scaling(w_arr, eta_arr, lam_arr, {}, {}, {})


cdef void _soc_w(double[:] wb, double eta, double[:] u, double[:] out,
                 Py_ssize_t off, Py_ssize_t dim, bint inverse) nogil:
    cdef double dot = 0.0
    cdef double sgn = -1.0 if inverse else 1.0
    cdef Py_ssize_t i
    for i in range(1, dim):
        dot += sgn * wb[off + i] * u[off + i]
    cdef double head = wb[off] * u[off] + dot
    cdef double scale = u[off] + dot / (1.0 + wb[off])
    cdef double fac = (1.0 / eta) if inverse else eta
    out[off] = fac * head
    for i in range(1, dim):
        out[off + i] = fac * (u[off + i] + scale * sgn * wb[off + i])


def apply_W(layout, scal, u_arr):
    return _apply(layout, scal, u_arr, False)


def apply_Winv(layout, scal, u_arr):
    return _apply(layout, scal, u_arr, True)


def apply_WinvT(layout, scal, u_arr):
    # W is symmetric for these cones
    return _apply(layout, scal, u_arr, True)


def _apply(layout, scal, u_arr, bint inverse):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] u = np.ascontiguousarray(u_arr)
    cdef double[:] w = scal.w
    cdef double[:] eta = scal.eta
    out_arr = np.empty(layout.slots)
    cdef double[:] out = out_arr
    cdef Py_ssize_t kb, i, off, dim
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            if inverse:
                for i in range(dim):
                    out[off + i] = u[off + i] / w[off + i]
            else:
                for i in range(dim):
                    out[off + i] = u[off + i] * w[off + i]
        else:
            _soc_w(w, eta[kb], u, out, off, dim, inverse)
    return out_arr


def dense_Hinv(layout, scal):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] w = scal.w
    cdef double[:] eta = scal.eta
    H_arr = np.zeros((layout.slots, layout.slots))
    cdef double[:, :] H = H_arr
    cdef Py_ssize_t kb, i, j, off, dim
    cdef double inv_eta2, wi, wj
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                H[off + i, off + i] = 1.0 / (w[off + i] * w[off + i])
        else:
            inv_eta2 = 1.0 / (eta[kb] * eta[kb])
            for i in range(dim):
                wi = w[off + i] if i == 0 else -w[off + i]
                for j in range(dim):
                    wj = w[off + j] if j == 0 else -w[off + j]
                    H[off + i, off + j] = 2.0 * wi * wj * inv_eta2
                H[off + i, off + i] += (-inv_eta2 if i == 0 else inv_eta2)
    return H_arr


def jordan_mul(layout, u_arr, v_arr):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] u = np.ascontiguousarray(u_arr)
    cdef double[:] v = np.ascontiguousarray(v_arr)
    out_arr = np.empty(layout.slots)
    cdef double[:] out = out_arr
    cdef Py_ssize_t kb, i, off, dim
    cdef double dot
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                out[off + i] = u[off + i] * v[off + i]
        else:
            dot = 0.0
            for i in range(dim):
                dot += u[off + i] * v[off + i]
            for i in range(1, dim):
                out[off + i] = u[off] * v[off + i] + v[off] * u[off + i]
            out[off] = dot
    return out_arr


def jordan_div_lam(layout, scal, d_arr):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] d = np.ascontiguousarray(d_arr)
    cdef double[:] lam = scal.lam
    out_arr = np.empty(layout.slots)
    cdef double[:] out = out_arr
    cdef Py_ssize_t kb, i, off, dim
    cdef double nl1, delta, dot, coef
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                out[off + i] = d[off + i] / lam[off + i]
        else:
            nl1 = 0.0
            for i in range(1, dim):
                nl1 += lam[off + i] * lam[off + i]
            nl1 = sqrt(nl1)
            delta = (lam[off] - nl1) * (lam[off] + nl1)
            dot = 0.0
            for i in range(1, dim):
                dot += lam[off + i] * d[off + i]
            out[off] = (lam[off] * d[off] - dot) / delta
            coef = dot / (lam[off] * delta) - d[off] / delta
            for i in range(1, dim):
                out[off + i] = d[off + i] / lam[off] + coef * lam[off + i]
    return out_arr


def lam_sq(layout, scal):
    return jordan_mul(layout, scal.lam, scal.lam)


def max_step(layout, x_arr, dx_arr):
    cdef cnp.int32_t[:] kinds = layout.kinds
    cdef cnp.int32_t[:] dims = layout.dims
    cdef cnp.int32_t[:] offsets = layout.offsets
    cdef double[:] x = np.ascontiguousarray(x_arr)
    cdef double[:] dx = np.ascontiguousarray(dx_arr)
    cdef double alpha = INFINITY
    cdef Py_ssize_t kb, i, off, dim
    cdef double t, aq, bq, cq, nx1, nd1, dotxd, disc, r, r1, r2
    for kb in range(kinds.shape[0]):
        off = offsets[kb]
        dim = dims[kb]
        if kinds[kb] == C_NONNEG:
            for i in range(dim):
                if dx[off + i] < 0.0:
                    t = -x[off + i] / dx[off + i]
                    if t < alpha:
                        alpha = t
        else:
            nx1 = 0.0
            nd1 = 0.0
            dotxd = 0.0
            for i in range(1, dim):
                nx1 += x[off + i] * x[off + i]
                nd1 += dx[off + i] * dx[off + i]
                dotxd += x[off + i] * dx[off + i]
            nx1 = sqrt(nx1)
            nd1 = sqrt(nd1)
            aq = (dx[off] - nd1) * (dx[off] + nd1)
            bq = 2.0 * (x[off] * dx[off] - dotxd)
            cq = (x[off] - nx1) * (x[off] + nx1)
            if aq > -1e-300 and aq < 1e-300:
                if bq < 0.0:
                    t = -cq / bq
                    if t < alpha:
                        alpha = t
            elif aq > 0.0:
                disc = bq * bq - 4.0 * aq * cq
                if disc >= 0.0:
                    r = sqrt(disc)
                    r1 = (-bq - r) / (2.0 * aq)
                    r2 = (-bq + r) / (2.0 * aq)
                    if r1 > 0.0:
                        if r1 < alpha:
                            alpha = r1
                    elif r2 > 0.0:
                        if r2 < alpha:
                            alpha = r2
            else:
                disc = bq * bq - 4.0 * aq * cq
                if disc < 0.0:
                    disc = 0.0
                r = sqrt(disc)
                r1 = (-bq - r) / (2.0 * aq)
                r2 = (-bq + r) / (2.0 * aq)
                t = r1 if r1 > 0.0 else r2
                if r1 > 0.0 and r2 > 0.0:
                    t = r1 if r1 < r2 else r2
                if t > 0.0 and t < alpha:
                    alpha = t
    return alpha
