"""Pure-NumPy cone kernels for the interior-point solver.

These are the per-iteration "hot" operations of the solver: Nesterov-Todd
scaling computation, scaled-space products, Jordan-algebra operations and
step-to-boundary searches over the composite cone.  A compiled twin of this
module (``_speedups``) implements the same interface for layouts made of
nonnegative and second-order blocks only; semidefinite blocks always run
through this module.

Scaling conventions (per block, scaled point lam = W z = W^{-T} x):

* nonnegative: W = diag(w), w_i = sqrt(x_i / z_i)
* second order: W = eta * [[wb0, wb1'], [wb1, I + wb1 wb1'/(1+wb0)]] with
  wb'J wb = 1 (J = diag(1, -I)); W is symmetric.
* psd (svec packing): W u = svec(R' mat(u) R) with R from the Cholesky/SVD
  construction; lam is the svec of the diagonal scaling matrix.
"""

import dataclasses

import numpy as np
import scipy.linalg

from .problem import (NonnegativeCone, PsdCone, SecondOrderCone, smat,
                      svec)

KIND_NONNEG = 0
KIND_SOC = 1
KIND_PSD = 2


@dataclasses.dataclass(frozen=True)
class ConeLayout:
    kinds: np.ndarray    # int32 per block
    dims: np.ndarray     # int32: block dim (psd: matrix order)
    offsets: np.ndarray  # int32: slot offset of each block
    slots: int
    degree: int

    @property
    def has_psd(self) -> bool:
        return bool((self.kinds == KIND_PSD).any())


def build_layout(cones) -> ConeLayout:
    kinds, dims, offsets = [], [], []
    off = 0
    degree = 0
    for cone in cones:
        offsets.append(off)
        if isinstance(cone, NonnegativeCone):
            kinds.append(KIND_NONNEG)
            dims.append(cone.dim)
        elif isinstance(cone, SecondOrderCone):
            kinds.append(KIND_SOC)
            dims.append(cone.dim)
        elif isinstance(cone, PsdCone):
            kinds.append(KIND_PSD)
            dims.append(cone.order)
        else:
            raise TypeError(f"unknown cone {cone!r}")
        off += cone.slots
        degree += cone.degree
    return ConeLayout(np.asarray(kinds, dtype=np.int32),
                      np.asarray(dims, dtype=np.int32),
                      np.asarray(offsets, dtype=np.int32),
                      off, degree)


def _blocks(layout):
    for kind, dim, off in zip(layout.kinds, layout.dims, layout.offsets):
        if kind == KIND_PSD:
            yield int(kind), int(dim), int(off), dim * (dim + 1) // 2
        else:
            yield int(kind), int(dim), int(off), int(dim)


@dataclasses.dataclass
class Scaling:
    w: np.ndarray          # nonneg w / soc wbar entries, slot-aligned
    eta: np.ndarray        # per-block eta (soc only)
    lam: np.ndarray        # scaled point, slot-aligned
    psd_R: dict            # block index -> R
    psd_Rinv: dict         # block index -> R^{-1}
    psd_sigma: dict        # block index -> lam diagonal


def identity(layout: ConeLayout) -> np.ndarray:
    """Cone identity element e (interior starting point)."""
    e = np.zeros(layout.slots)
    for kind, dim, off, slots in _blocks(layout):
        if kind == KIND_NONNEG:
            e[off:off + slots] = 1.0
        elif kind == KIND_SOC:
            e[off] = 1.0
        else:
            e[off:off + slots] = svec(np.eye(dim))
    return e


def compute_scaling(layout: ConeLayout, x: np.ndarray,
                    z: np.ndarray) -> Scaling:
    w = np.zeros(layout.slots)
    eta = np.zeros(len(layout.kinds))
    lam = np.zeros(layout.slots)
    psd_R, psd_Rinv, psd_sigma = {}, {}, {}
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        xb = x[off:off + slots]
        zb = z[off:off + slots]
        if kind == KIND_NONNEG:
            w[off:off + slots] = np.sqrt(xb / zb)
            lam[off:off + slots] = np.sqrt(xb * zb)
        elif kind == KIND_SOC:
            nx1 = np.linalg.norm(xb[1:])
            nz1 = np.linalg.norm(zb[1:])
            res_x = (xb[0] - nx1) * (xb[0] + nx1)
            res_z = (zb[0] - nz1) * (zb[0] + nz1)
            if res_x <= 0 or res_z <= 0:
                raise FloatingPointError("second-order iterate left the cone")
            a = np.sqrt(res_x)
            bz = np.sqrt(res_z)
            xn = xb / a
            zn = zb / bz
            gamma = np.sqrt((1.0 + xn @ zn) / 2.0)
            wb = np.empty(slots)
            wb[0] = (xn[0] + zn[0]) / (2.0 * gamma)
            wb[1:] = (xn[1:] - zn[1:]) / (2.0 * gamma)
            w[off:off + slots] = wb
            eta[idx] = np.sqrt(a / bz)
            lam[off:off + slots] = _soc_apply_w(wb, eta[idx], zb)
        else:
            X = smat(xb, dim)
            Z = smat(zb, dim)
            Lx = np.linalg.cholesky(X)
            Lz = np.linalg.cholesky(Z)
            U, sig, Vt = np.linalg.svd(Lz.T @ Lx)
            inv_root = 1.0 / np.sqrt(sig)
            R = Lx @ Vt.T * inv_root
            Rinv = (U * inv_root).T @ Lz.T
            psd_R[idx] = R
            psd_Rinv[idx] = Rinv
            psd_sigma[idx] = sig
            lam[off:off + slots] = svec(np.diag(sig))
    return Scaling(w, eta, lam, psd_R, psd_Rinv, psd_sigma)


def _soc_apply_w(wb, eta, u):
    """W u for one second-order block."""
    dot = wb[1:] @ u[1:]
    out = np.empty_like(u)
    out[0] = wb[0] * u[0] + dot
    out[1:] = u[1:] + (u[0] + dot / (1.0 + wb[0])) * wb[1:]
    return eta * out


def _soc_apply_winv(wb, eta, u):
    dot = wb[1:] @ u[1:]
    out = np.empty_like(u)
    out[0] = wb[0] * u[0] - dot
    out[1:] = u[1:] + (-u[0] + dot / (1.0 + wb[0])) * wb[1:]
    return out / eta


def apply_W(layout, scal, u):
    out = np.empty(layout.slots)
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        ub = u[off:off + slots]
        if kind == KIND_NONNEG:
            out[off:off + slots] = scal.w[off:off + slots] * ub
        elif kind == KIND_SOC:
            out[off:off + slots] = _soc_apply_w(
                scal.w[off:off + slots], scal.eta[idx], ub)
        else:
            R = scal.psd_R[idx]
            out[off:off + slots] = svec(R.T @ smat(ub, dim) @ R)
    return out


def apply_Winv(layout, scal, u):
    out = np.empty(layout.slots)
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        ub = u[off:off + slots]
        if kind == KIND_NONNEG:
            out[off:off + slots] = ub / scal.w[off:off + slots]
        elif kind == KIND_SOC:
            out[off:off + slots] = _soc_apply_winv(
                scal.w[off:off + slots], scal.eta[idx], ub)
        else:
            Ri = scal.psd_Rinv[idx]
            out[off:off + slots] = svec(Ri.T @ smat(ub, dim) @ Ri)
    return out


def apply_WinvT(layout, scal, u):
    out = np.empty(layout.slots)
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        ub = u[off:off + slots]
        if kind == KIND_NONNEG:
            out[off:off + slots] = ub / scal.w[off:off + slots]
        elif kind == KIND_SOC:
            out[off:off + slots] = _soc_apply_winv(
                scal.w[off:off + slots], scal.eta[idx], ub)
        else:
            Ri = scal.psd_Rinv[idx]
            out[off:off + slots] = svec(Ri @ smat(ub, dim) @ Ri.T)
    return out


def dense_Hinv(layout, scal):
    """Dense block-diagonal W^{-1} W^{-T} (the KKT (1,1) cone block)."""
    H = np.zeros((layout.slots, layout.slots))
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        sl = slice(off, off + slots)
        if kind == KIND_NONNEG:
            H[sl, sl] = np.diag(1.0 / scal.w[sl] ** 2)
        elif kind == KIND_SOC:
            wt = scal.w[sl].copy()
            wt[1:] = -wt[1:]
            J = -np.eye(slots)
            J[0, 0] = 1.0
            H[sl, sl] = (2.0 * np.outer(wt, wt) - J) / scal.eta[idx] ** 2
        else:
            Ri = scal.psd_Rinv[idx]
            P = Ri.T @ Ri
            H[sl, sl] = _sym_kron(P)
    return H


def _sym_kron(P):
    """Matrix of u -> svec(P mat(u) P) in svec coordinates."""
    n = P.shape[0]
    d = n * (n + 1) // 2
    out = np.empty((d, d))
    k = 0
    rt2 = np.sqrt(2.0)
    for j in range(n):
        for i in range(j, n):
            if i == j:
                B = np.outer(P[:, j], P[j, :])
            else:
                B = (np.outer(P[:, i], P[j, :])
                     + np.outer(P[:, j], P[i, :])) / rt2
            out[:, k] = svec(0.5 * (B + B.T))
            k += 1
    return out


def jordan_mul(layout, u, v):
    out = np.empty(layout.slots)
    for kind, dim, off, slots in _blocks(layout):
        ub = u[off:off + slots]
        vb = v[off:off + slots]
        if kind == KIND_NONNEG:
            out[off:off + slots] = ub * vb
        elif kind == KIND_SOC:
            out[off] = ub @ vb
            out[off + 1:off + slots] = ub[0] * vb[1:] + vb[0] * ub[1:]
        else:
            U = smat(ub, dim)
            V = smat(vb, dim)
            out[off:off + slots] = svec(0.5 * (U @ V + V @ U))
    return out


def jordan_div_lam(layout, scal, d):
    """Solve lam o g = d for g."""
    out = np.empty(layout.slots)
    for idx, (kind, dim, off, slots) in enumerate(_blocks(layout)):
        db = d[off:off + slots]
        lb = scal.lam[off:off + slots]
        if kind == KIND_NONNEG:
            out[off:off + slots] = db / lb
        elif kind == KIND_SOC:
            delta = (lb[0] - np.linalg.norm(lb[1:])) \
                * (lb[0] + np.linalg.norm(lb[1:]))
            dot = lb[1:] @ db[1:]
            out[off] = (lb[0] * db[0] - dot) / delta
            out[off + 1:off + slots] = db[1:] / lb[0] \
                + (dot / (lb[0] * delta) - db[0] / delta) * lb[1:]
        else:
            sig = scal.psd_sigma[idx]
            D = smat(db, dim)
            out[off:off + slots] = svec(2.0 * D / np.add.outer(sig, sig))
    return out


def lam_sq(layout, scal):
    """lam o lam."""
    return jordan_mul(layout, scal.lam, scal.lam)


def max_step(layout, x, dx) -> float:
    """Largest alpha with x + alpha*dx in the cone (x strictly interior)."""
    alpha = np.inf
    for kind, dim, off, slots in _blocks(layout):
        xb = x[off:off + slots]
        db = dx[off:off + slots]
        if kind == KIND_NONNEG:
            neg = db < 0
            if neg.any():
                alpha = min(alpha, np.min(-xb[neg] / db[neg]))
        elif kind == KIND_SOC:
            alpha = min(alpha, _soc_max_step(xb, db))
        else:
            X = smat(xb, dim)
            D = smat(db, dim)
            L = np.linalg.cholesky(X)
            A = scipy.linalg.solve_triangular(L, D, lower=True)
            A = scipy.linalg.solve_triangular(L, A.T, lower=True).T
            mu = np.linalg.eigvalsh(0.5 * (A + A.T))[0]
            if mu < 0:
                alpha = min(alpha, -1.0 / mu)
    return alpha


def _soc_max_step(x, d):
    a = (d[0] - np.linalg.norm(d[1:])) * (d[0] + np.linalg.norm(d[1:]))
    b = 2.0 * (x[0] * d[0] - x[1:] @ d[1:])
    c = (x[0] - np.linalg.norm(x[1:])) * (x[0] + np.linalg.norm(x[1:]))
    if abs(a) < 1e-300:
        return -c / b if b < 0 else np.inf
    disc = b * b - 4.0 * a * c
    if a > 0:
        if disc < 0:
            return np.inf
        r = np.sqrt(disc)
        r1 = (-b - r) / (2.0 * a)
        r2 = (-b + r) / (2.0 * a)
        if r1 > 0:
            return r1
        if r2 > 0:          # r1 <= 0 < r2 cannot occur when c > 0, a > 0
            return r2
        return np.inf
    # a < 0: f(0) = c > 0 sits between the roots, take the positive one
    r = np.sqrt(max(disc, 0.0))
    r1 = (-b - r) / (2.0 * a)
    r2 = (-b + r) / (2.0 * a)
    pos = min(t for t in (r1, r2) if t > 0)
    return pos
