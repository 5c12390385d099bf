"""Primal-dual interior-point solver over the homogeneous self-dual
embedding.

Solves :class:`~mimobeam.conic.problem.ConicProblem` instances

    minimize c'x   s.t.  A x = b,  x = (x_free, x_cone),  x_cone in K

by embedding primal and dual into the self-dual system

    A x           = b tau
    A' y + z      = c tau          (z zero on free slots)
    c' x - b' y   = -kappa

with x_cone, z_cone in K, tau, kappa >= 0, and driving the complementarity
products to zero with Mehrotra predictor-corrector steps under Nesterov-Todd
scaling.  tau/kappa tell solved and infeasible/unbounded cases apart and
yield certificates for the latter, so infeasibility is a status, not a
crash.  All linear algebra is dense; the intended problem scale is tens to a
few hundred variables.
"""

import numpy as np
import scipy.linalg

from . import backend
from .problem import ConicProblem, ConicSolution, SolverSettings, SolveStatus

_STEP = 0.98
_MIN_STEP = 1e-11
_INF_TAU_RATIO = 1e-2  # certify infeasibility only once tau << kappa


def solve(problem: ConicProblem,
          settings: SolverSettings | None = None) -> ConicSolution:
    """Solve a conic problem; never raises for solvable-but-hard instances,
    reporting a status instead."""
    settings = settings or SolverSettings()
    ker, layout = backend.select(problem.cones, settings.backend)
    try:
        return _solve_hsde(problem, settings, ker, layout)
    except (FloatingPointError, np.linalg.LinAlgError):
        n, m = problem.num_vars, problem.num_eq
        return ConicSolution(SolveStatus.NUMERICAL_FAILURE, np.zeros(n),
                             np.zeros(m), np.zeros(n), np.nan, 0,
                             np.inf, np.inf, np.inf)


def _solve_hsde(problem, settings, ker, layout):
    c, A, b = problem.c, problem.A, problem.b
    n, m = problem.num_vars, problem.num_eq
    f = problem.num_free
    cs = slice(f, n)  # cone slots within x/z
    tol = settings.tolerance
    eps = settings.static_regularization
    nu = layout.degree + 1

    norm_b = 1.0 + np.linalg.norm(b)
    norm_c = 1.0 + np.linalg.norm(c)

    e = ker.identity(layout)
    x = np.zeros(n)
    x[cs] = e
    z = np.zeros(n)
    z[cs] = e
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0

    reg = np.zeros(n + m)
    reg[:n] = -eps
    reg[n:] = eps
    diag_idx = np.arange(n + m)
    M_base = np.zeros((n + m, n + m))
    M_base[:n, n:] = A.T
    M_base[n:, :n] = A
    M_base[diag_idx, diag_idx] += reg

    best = None
    for it in range(settings.max_iterations):
        if not (np.isfinite(x).all() and np.isfinite(z).all()
                and np.isfinite(y).all() and np.isfinite(tau)
                and np.isfinite(kappa)):
            return _finish(problem, SolveStatus.NUMERICAL_FAILURE, best, it)

        r_p = A @ x - b * tau
        r_d = -(A.T @ y) - z + c * tau
        r_g = c @ x - b @ y + kappa
        mu = (x[cs] @ z[cs] + tau * kappa) / nu

        # -- convergence bookkeeping on the tau-scaled candidate ------------
        xs = x / tau
        ys = y / tau
        zs = z / tau
        pres = np.linalg.norm(A @ xs - b) / norm_b
        dres = np.linalg.norm(A.T @ ys + zs - c) / norm_c
        pcost = c @ xs
        dcost = b @ ys
        gap = x[cs] @ z[cs] / tau ** 2
        relgap = gap / max(1.0, abs(pcost), abs(dcost))
        cand = (xs, ys, zs, pcost, it + 1, pres, dres, relgap)
        if best is None or max(pres, dres, relgap) < max(best[5], best[6],
                                                         best[7]):
            best = cand
        if pres <= tol and dres <= tol and relgap <= tol:
            return _finish(problem, SolveStatus.OPTIMAL, cand, it + 1)

        # -- infeasibility / unboundedness certificates ----------------------
        if tau <= _INF_TAU_RATIO * kappa:
            by = b @ y
            if by > 0:
                cert = np.linalg.norm(A.T @ (y / by) + z / by)
                if cert <= tol * norm_c:
                    return _certify(problem, SolveStatus.INFEASIBLE,
                                    y / by, z / by, it + 1, cert)
            cx = c @ x
            if cx < 0:
                ray = x / (-cx)
                cert = np.linalg.norm(A @ ray)
                if cert <= tol * norm_b:
                    return _certify(problem, SolveStatus.UNBOUNDED,
                                    ray, None, it + 1, cert)

        # -- Nesterov-Todd scaling and KKT factorization ---------------------
        try:
            scal = ker.compute_scaling(layout, x[cs], z[cs])
        except (FloatingPointError, np.linalg.LinAlgError):
            return _finish(problem, SolveStatus.NUMERICAL_FAILURE, best, it)
        Hinv = ker.dense_Hinv(layout, scal)
        M = M_base.copy()
        M[cs, cs.start:n] -= Hinv
        lu = scipy.linalg.lu_factor(M, check_finite=False)

        def kkt_solve(r1, r2):
            rhs = np.concatenate([r1, r2])
            sol = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
            # one refinement pass against the unregularized matrix
            resid = rhs - M @ sol + reg * sol
            sol += scipy.linalg.lu_solve(lu, resid, check_finite=False)
            return sol[:n], sol[n:]

        dx1, dy1 = kkt_solve(c, b)
        # c'dx1 - b'dy1 equals -||W^{-T} dx1||^2 at the exact KKT solution;
        # the squared norm keeps the denominator strictly negative where the
        # direct expression suffers catastrophic cancellation near optimum.
        den = -np.linalg.norm(
            ker.apply_WinvT(layout, scal, dx1[cs])) ** 2 - kappa / tau
        if not np.isfinite(den):
            return _finish(problem, SolveStatus.NUMERICAL_FAILURE, best,
                           it + 1)

        lam_sq = ker.lam_sq(layout, scal)

        def direction(eta, d_comp, d_tk):
            r1 = -eta * r_d
            r1[cs] += ker.apply_Winv(layout, scal,
                                     ker.jordan_div_lam(layout, scal, d_comp))
            r2 = -eta * r_p
            dx0, dy0 = kkt_solve(-r1, r2)
            dtau = (-eta * r_g - d_tk / tau - c @ dx0 + b @ dy0) / den
            dx = dx0 + dtau * dx1
            dy = dy0 + dtau * dy1
            dz = np.zeros(n)
            dz[cs] = ker.apply_Winv(
                layout, scal,
                ker.jordan_div_lam(layout, scal, d_comp)
                - ker.apply_WinvT(layout, scal, dx[cs]))
            dkappa = (d_tk - kappa * dtau) / tau
            return dx, dy, dz, dtau, dkappa

        # predictor (affine) direction
        dxa, dya, dza, dta, dka = direction(1.0, -lam_sq, -tau * kappa)
        alpha_a = _step_length(ker, layout, x[cs], dxa[cs], z[cs], dza[cs],
                               tau, dta, kappa, dka)
        mu_aff = (((x[cs] + alpha_a * dxa[cs]) @ (z[cs] + alpha_a * dza[cs]))
                  + (tau + alpha_a * dta) * (kappa + alpha_a * dka)) / nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector + centering
        corr = ker.jordan_mul(layout,
                              ker.apply_WinvT(layout, scal, dxa[cs]),
                              ker.apply_W(layout, scal, dza[cs]))
        d_comp = -lam_sq - corr + sigma * mu * e
        d_tk = -tau * kappa - dta * dka + sigma * mu
        dx, dy, dz, dtau, dkappa = direction(1.0 - sigma, d_comp, d_tk)

        alpha = _step_length(ker, layout, x[cs], dx[cs], z[cs], dz[cs],
                             tau, dtau, kappa, dkappa)
        if alpha <= _MIN_STEP:
            return _finish(problem, SolveStatus.NUMERICAL_FAILURE, best,
                           it + 1)
        x += alpha * dx
        y += alpha * dy
        z += alpha * dz
        tau += alpha * dtau
        kappa += alpha * dkappa

    return _finish(problem, SolveStatus.MAX_ITERATIONS, best,
                   settings.max_iterations)


def _step_length(ker, layout, xc, dxc, zc, dzc, tau, dtau, kappa, dkappa):
    alpha = min(ker.max_step(layout, xc, dxc),
                ker.max_step(layout, zc, dzc))
    if dtau < 0:
        alpha = min(alpha, -tau / dtau)
    if dkappa < 0:
        alpha = min(alpha, -kappa / dkappa)
    return min(1.0, _STEP * alpha)


def _finish(problem, status, cand, iterations):
    n, m = problem.num_vars, problem.num_eq
    if cand is None:
        return ConicSolution(status, np.zeros(n), np.zeros(m), np.zeros(n),
                             np.nan, iterations, np.inf, np.inf, np.inf)
    xs, ys, zs, pcost, _, pres, dres, relgap = cand
    return ConicSolution(status, xs, ys, zs, pcost, iterations,
                         pres, dres, relgap)


def _certify(problem, status, ray_or_y, z, iterations, cert_res):
    n, m = problem.num_vars, problem.num_eq
    if status is SolveStatus.INFEASIBLE:
        return ConicSolution(status, np.zeros(n), ray_or_y, z, np.nan,
                             iterations, cert_res, cert_res, np.inf)
    return ConicSolution(status, ray_or_y, np.zeros(m), np.zeros(n), np.nan,
                         iterations, cert_res, cert_res, np.inf)
