"""Weight-design methods for the joint transmit/receive virtual array.

Baselines: sample matrix inversion (SMI), diagonally loaded SMI, and the
worst-case robust design over a norm ball of steering errors.  The
probability-constrained designs restrict the joint weight to the Kronecker
form w = u (x) v and alternate exact transmit/receive minimizations (block
coordinate descent), each step a small second-order cone program:

    minimize (u (x) v)^H R (u (x) v)
    s.t.     (u^H a_t - g1 ||Ct^{1/2} u||) (v^H a_r - g2 ||Cr^{1/2} v||) >= 1

with the per-side coefficients g coming from the chance-constraint
reduction: g = sqrt(ln 1/(1-eta)) under Gaussian mismatch (Rayleigh tail of
|u^H e|), or g = 1/sqrt(1-eta) from the Chebyshev bound when only second
moments are known.
"""

import dataclasses
import math

import numpy as np

from . import linalg
from .conic import SolverSettings, SolveStatus
from .conic.csocp import ComplexSocp
from .conic.ipm import solve as conic_solve
from .conic.problem import ConicProblem, NonnegativeCone, SecondOrderCone
from .errors import (InfeasibleError, NonpositiveMarginError,
                     SingularMatrixError, SolverFailureError)

_SUBPROBLEM_SETTINGS = SolverSettings(tolerance=1e-9, max_iterations=100)


@dataclasses.dataclass(frozen=True)
class BeamformerWeights:
    """Joint weight w; u and v are set when w has Kronecker structure."""
    w: np.ndarray
    u: np.ndarray | None = None
    v: np.ndarray | None = None


@dataclasses.dataclass(frozen=True)
class BcdSettings:
    delta: float = 1e-4        # relative weight-change stopping threshold
    max_iterations: int = 50

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclasses.dataclass
class BcdResult:
    weights: BeamformerWeights
    objective_trace: np.ndarray  # value after every half-step (v then u)
    iterations: int
    converged: bool


def regularize_covariance(R: np.ndarray, scale: float = 1e-6) -> np.ndarray:
    """R + scale * (trace/dim) * I; keeps borderline sample covariances
    invertible without disturbing the spectrum meaningfully."""
    R = np.asarray(R, dtype=complex)
    dim = R.shape[0]
    return R + scale * (np.trace(R).real / dim) * np.eye(dim)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def smi(R: np.ndarray, d: np.ndarray) -> BeamformerWeights:
    """Distortionless minimum-variance weight R^{-1} d / (d^H R^{-1} d)."""
    R = np.asarray(R, dtype=complex)
    eig = np.linalg.eigvalsh(R)
    if eig[0] <= 0 or eig[-1] / eig[0] > 1e12:
        raise SingularMatrixError(
            f"covariance condition {eig[-1] / max(eig[0], 1e-300):.2e} "
            "exceeds 1e12; more snapshots or loading needed")
    w = np.linalg.solve(R, np.asarray(d, dtype=complex))
    return BeamformerWeights(w=w / np.vdot(d, w))


def lsmi(R: np.ndarray, d: np.ndarray, loading: float) -> BeamformerWeights:
    """SMI on the diagonally loaded covariance R + loading * I."""
    if loading < 0:
        raise ValueError("loading must be nonnegative")
    R = np.asarray(R, dtype=complex)
    return smi(R + loading * np.eye(R.shape[0]), d)


_WC_SETTINGS = SolverSettings(tolerance=1e-7, max_iterations=200)


def worst_case(R: np.ndarray, d: np.ndarray, epsilon: float,
               settings: SolverSettings | None = None) -> BeamformerWeights:
    """Robust design over the ball of steering errors of radius epsilon:

        minimize w^H R w   s.t.  Re(w^H d) - epsilon ||w|| >= 1,
                                 Im(w^H d) = 0.

    Full-dimensional (the weight is unstructured), so the conic program is
    an order of magnitude larger than the coordinate-descent subproblems;
    1e-7 residuals are plenty for a weight vector and far more reliable on
    sample covariances spanning many decades.
    """
    d = np.asarray(d, dtype=complex)
    if epsilon >= np.linalg.norm(d):
        raise InfeasibleError(
            f"epsilon {epsilon} >= ||d|| {np.linalg.norm(d):.4g}: the "
            "robust constraint admits no weight")
    settings = settings or _WC_SETTINGS
    if epsilon == 0.0:
        model = ComplexSocp(d.size).minimize_quad(R)
        model.add_real_ineq(d, -1.0)
        model.add_imag_eq(d, 0.0)
        sol = model.solve(settings)
        _require_optimal(sol.status, "worst-case design")
        return BeamformerWeights(w=sol.x)
    problem = _worst_case_problem(R, d, epsilon)
    sol = conic_solve(problem, settings)
    if sol.status is SolveStatus.INFEASIBLE:
        raise InfeasibleError("worst-case design is infeasible")
    salvageable = (np.isfinite(sol.x).all()
                   and max(sol.primal_residual, sol.dual_residual,
                           sol.gap) <= 100 * settings.tolerance)
    if sol.status is not SolveStatus.OPTIMAL and not salvageable:
        raise SolverFailureError(
            f"worst-case design failed with status {sol.status.value}")
    n = d.size
    w = linalg.lift_vector(sol.x[1:1 + 2 * n])
    return BeamformerWeights(w=w)


def _worst_case_problem(R, d, epsilon) -> ConicProblem:
    """Direct conic encoding with the weight embedded as a cone tail, which
    roughly halves the KKT dimension versus the generic builder."""
    n = d.size
    nf = 2 * n
    S = linalg.hermitian_sqrt(R)
    Femb = linalg.embed_matrix(S)
    # variables: (m, wr) in SOC(1+nf) with m = (Re(d^H w) - 1)/eps and
    # wr the embedded weight, then (t, q) in SOC(1+nf) with q = Femb wr.
    nv = 2 * (1 + nf)
    rows = np.zeros((nf + 2, nv))
    rhs = np.zeros(nf + 2)
    rows[:nf, 1:1 + nf] = -Femb
    rows[:nf, 2 + nf:] = np.eye(nf)
    rows[nf, 0] = 1.0
    rows[nf, 1:1 + nf] = -linalg.real_part_row(d) / epsilon
    rhs[nf] = -1.0 / epsilon
    rows[nf + 1, 1:1 + nf] = linalg.imag_part_row(d)
    c = np.zeros(nv)
    c[1 + nf] = 1.0
    return ConicProblem(c, rows, rhs,
                        (SecondOrderCone(1 + nf), SecondOrderCone(1 + nf)),
                        num_free=0)


# ---------------------------------------------------------------------------
# chance-constraint coefficients
# ---------------------------------------------------------------------------

def gamma_gaussian(eta: float) -> float:
    """sqrt(ln 1/(1-eta)): Rayleigh-tail coefficient for Gaussian mismatch."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    return math.sqrt(math.log(1.0 / (1.0 - eta)))


def gamma_chebyshev(eta: float) -> float:
    """1/sqrt(1-eta): distribution-free coefficient via Chebyshev."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    return 1.0 / math.sqrt(1.0 - eta)


# ---------------------------------------------------------------------------
# block coordinate descent over the Kronecker factors
# ---------------------------------------------------------------------------

def robustness_margin(x: np.ndarray, a: np.ndarray,
                      cov_sqrt: np.ndarray, gamma: float) -> float:
    """Re(x^H a) - gamma * ||cov_sqrt x||, the per-side constraint slack."""
    return float(np.real(np.vdot(x, a))
                 - gamma * np.linalg.norm(cov_sqrt @ x))


def _restricted_quadratic(R4, u, side):
    """Quadratic matrix of v -> (u (x) v)^H R (u (x) v) (side='rx') or of
    u at fixed v (side='tx'), via index reshuffling of the virtual R."""
    if side == "rx":
        Q = np.einsum("i,ijkl,k->jl", u.conj(), R4, u)
    else:
        Q = np.einsum("j,ijkl,l->ik", u.conj(), R4, u)
    return linalg.hermitianize(Q)


def _side_model(Q, a, cov_sqrt, gamma, rho):
    model = ComplexSocp(a.size).minimize_quad(Q)
    if gamma > 0.0 and np.linalg.norm(cov_sqrt) > 0.0:
        model.add_soc(cov_sqrt, np.zeros(a.size), a / gamma, -rho / gamma)
    else:
        model.add_real_ineq(a, -rho)
    model.add_imag_eq(a, 0.0)
    return model


def build_receive_subproblem(R, u_k, a_r, cr_sqrt, gamma1, gamma2,
                             transmit_margin) -> ConicProblem:
    """Conic form of the receive half-step at fixed u_k.

    The coupled product constraint is divided through by the (positive)
    transmit margin, giving ||Cr^{1/2} v|| <= (v^H a_r - 1/margin)/gamma2.
    """
    if transmit_margin <= 0:
        raise NonpositiveMarginError(
            f"transmit margin {transmit_margin:.4g} <= 0: fix-u step cannot "
            "be linearized; re-initialize or fail the trial")
    u_k = np.asarray(u_k, dtype=complex)
    m_t, m_r = u_k.size, np.asarray(a_r).size
    R4 = np.asarray(R, dtype=complex).reshape(m_t, m_r, m_t, m_r)
    Q = _restricted_quadratic(R4, u_k, "rx")
    return _side_model(Q, np.asarray(a_r, dtype=complex),
                       np.asarray(cr_sqrt, dtype=complex), gamma2,
                       1.0 / transmit_margin).to_conic()


def build_transmit_subproblem(R, v_k, a_t, ct_sqrt, gamma1, gamma2,
                              receive_margin) -> ConicProblem:
    """Mirror image of :func:`build_receive_subproblem` at fixed v_k."""
    if receive_margin <= 0:
        raise NonpositiveMarginError(
            f"receive margin {receive_margin:.4g} <= 0: fix-v step cannot "
            "be linearized; re-initialize or fail the trial")
    v_k = np.asarray(v_k, dtype=complex)
    m_t, m_r = np.asarray(a_t).size, v_k.size
    R4 = np.asarray(R, dtype=complex).reshape(m_t, m_r, m_t, m_r)
    Q = _restricted_quadratic(R4, v_k, "tx")
    return _side_model(Q, np.asarray(a_t, dtype=complex),
                       np.asarray(ct_sqrt, dtype=complex), gamma1,
                       1.0 / receive_margin).to_conic()


_SALVAGE_RESIDUAL = 1e-7


def _solve_side(Q, a, cov_sqrt, gamma, rho, settings):
    """Solve one half-step; returns (x, exact objective x^H Q x).

    Internally the step is solved in whitened coordinates q = Q^{1/2} x, so
    the minimized norm is ||q|| and q sits directly in the epigraph cone;
    this halves the KKT dimension versus the generic reification.  A solve
    that stalls near tolerance (status not optimal but certified residuals
    <= 1e-7) is accepted: the descent only needs a good feasible point, and
    the objective is re-evaluated exactly.
    """
    dim = a.size
    vals, vecs = np.linalg.eigh(Q)
    vals = np.maximum(vals, 1e-14 * max(vals[-1], 1e-300))
    root = np.sqrt(vals)
    s_inv = (vecs / root) @ vecs.conj().T
    a_w = s_inv @ a  # s_inv is Hermitian
    nf = 2 * dim
    robust = gamma > 0.0 and np.linalg.norm(cov_sqrt) > 0.0
    if robust:
        m_w = linalg.embed_matrix(cov_sqrt @ s_inv)
        nv = 2 * (1 + nf)
        rows = np.zeros((nf + 2, nv))
        rhs = np.zeros(nf + 2)
        rows[:nf, 1:1 + nf] = -m_w
        rows[:nf, 2 + nf:] = np.eye(nf)
        rows[nf, 1 + nf] = 1.0
        rows[nf, 1:1 + nf] = -linalg.real_part_row(a_w) / gamma
        rhs[nf] = -rho / gamma
        rows[nf + 1, 1:1 + nf] = linalg.imag_part_row(a_w)
        cones = (SecondOrderCone(1 + nf), SecondOrderCone(1 + nf))
    else:
        nv = 1 + nf + 1
        rows = np.zeros((2, nv))
        rhs = np.zeros(2)
        rows[0, nf + 1] = 1.0
        rows[0, 1:1 + nf] = -linalg.real_part_row(a_w)
        rhs[0] = -rho
        rows[1, 1:1 + nf] = linalg.imag_part_row(a_w)
        cones = (SecondOrderCone(1 + nf), NonnegativeCone(1))
    c = np.zeros(nv)
    c[0] = 1.0
    sol = conic_solve(ConicProblem(c, rows, rhs, cones, num_free=0), settings)
    if sol.status is SolveStatus.INFEASIBLE:
        raise InfeasibleError("coordinate-descent subproblem is infeasible")
    acceptable = sol.status is SolveStatus.OPTIMAL or (
        np.isfinite(sol.x).all()
        and max(sol.primal_residual, sol.dual_residual,
                sol.gap) <= _SALVAGE_RESIDUAL)
    if not acceptable:
        raise SolverFailureError(
            "coordinate-descent subproblem failed with status "
            f"{sol.status.value}")
    x = s_inv @ linalg.lift_vector(sol.x[1:1 + nf])
    value = float(np.real(np.vdot(x, Q @ x)))
    return x, value


def _require_optimal(status, what):
    if status is SolveStatus.OPTIMAL:
        return
    if status is SolveStatus.INFEASIBLE:
        raise InfeasibleError(f"{what} is infeasible")
    raise SolverFailureError(f"{what} failed with status {status.value}")


def bcd_solve(R, a_t, a_r, C_t, C_r, gamma1, gamma2,
              settings: BcdSettings | None = None,
              solver_settings: SolverSettings | None = None) -> BcdResult:
    """Alternate receive/transmit minimizations from u_0 = a_t/||a_t||.

    Stops when both factors change by less than ``settings.delta`` in
    relative norm, returning the factors, the joint weight, and the
    objective value recorded after every half-step (nonincreasing).  If the
    nominal start has a nonpositive transmit margin the iteration restarts
    from the whitened steering vector (C_t + dI)^{-1} a_t, which is strictly
    feasible whenever the transmit constraint admits any point.
    """
    settings = settings or BcdSettings()
    solver_settings = solver_settings or _SUBPROBLEM_SETTINGS
    a_t = np.asarray(a_t, dtype=complex)
    a_r = np.asarray(a_r, dtype=complex)
    C_t = np.zeros((a_t.size,) * 2) if C_t is None else np.asarray(C_t)
    C_r = np.zeros((a_r.size,) * 2) if C_r is None else np.asarray(C_r)
    ct_sqrt = linalg.hermitian_sqrt(C_t)
    cr_sqrt = linalg.hermitian_sqrt(C_r)
    m_t, m_r = a_t.size, a_r.size
    R4 = np.asarray(R, dtype=complex).reshape(m_t, m_r, m_t, m_r)

    u = a_t / np.linalg.norm(a_t)
    if robustness_margin(u, a_t, ct_sqrt, gamma1) <= 0.0:
        u = _whitened_start(a_t, C_t)
        if robustness_margin(u, a_t, ct_sqrt, gamma1) <= 0.0:
            raise InfeasibleError(
                "transmit chance constraint admits no feasible weight "
                "(whitened start has nonpositive margin)")

    v = None
    trace = []
    converged = False
    iterations = 0
    for k in range(1, settings.max_iterations + 1):
        iterations = k
        c_t = robustness_margin(u, a_t, ct_sqrt, gamma1)
        if c_t <= 0.0:
            raise NonpositiveMarginError(
                f"transmit margin turned nonpositive at iteration {k}")
        Q_v = _restricted_quadratic(R4, u, "rx")
        v_new, obj = _solve_side(Q_v, a_r, cr_sqrt, gamma2, 1.0 / c_t,
                                 solver_settings)
        trace.append(obj)
        c_r = robustness_margin(v_new, a_r, cr_sqrt, gamma2)
        if c_r <= 0.0:
            raise NonpositiveMarginError(
                f"receive margin turned nonpositive at iteration {k}")
        Q_u = _restricted_quadratic(R4, v_new, "tx")
        u_new, obj = _solve_side(Q_u, a_t, ct_sqrt, gamma1, 1.0 / c_r,
                                 solver_settings)
        trace.append(obj)

        scale = np.linalg.norm(u_new)
        u_next = u_new / scale
        v_next = v_new * scale
        du = np.linalg.norm(u_next - u)
        dv = np.inf if v is None \
            else np.linalg.norm(v_next - v) / np.linalg.norm(v_next)
        u, v = u_next, v_next
        if du < settings.delta and dv < settings.delta:
            converged = True
            break

    # balance the scale indeterminacy so each side carries the same margin
    # sqrt(c_t * c_r) >= 1; the joint weight is unchanged and the per-side
    # chance guarantees then hold for the returned factors individually
    m_t = robustness_margin(u, a_t, ct_sqrt, gamma1)
    m_r = robustness_margin(v, a_r, cr_sqrt, gamma2)
    alpha = np.sqrt(m_r / m_t)
    u = u * alpha
    v = v / alpha
    w = linalg.kron(u, v)
    return BcdResult(BeamformerWeights(w=w, u=u, v=v),
                     np.asarray(trace), iterations, converged)


def _whitened_start(a, C):
    reg = 1e-10 * max(np.trace(C).real, 1e-30) / C.shape[0]
    u = np.linalg.solve(C + reg * np.eye(C.shape[0]), a)
    return u / np.linalg.norm(u)


def design_probability_constrained(R, a_t, a_r, C_t, C_r, eta1, eta2,
                                   variant: str,
                                   settings: BcdSettings | None = None,
                                   solver_settings=None) -> BcdResult:
    """Chance-constrained design at per-side confidence levels eta1, eta2;
    ``variant`` selects the Gaussian or the distribution-free coefficients."""
    if variant == "gaussian":
        g1, g2 = gamma_gaussian(eta1), gamma_gaussian(eta2)
    elif variant == "chebyshev":
        g1, g2 = gamma_chebyshev(eta1), gamma_chebyshev(eta2)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return bcd_solve(R, a_t, a_r, C_t, C_r, g1, g2, settings,
                     solver_settings)


def empirical_constraint_probability(x, a, sampler, n: int,
                                     rng: np.random.Generator,
                                     angle_deg: float = 0.0) -> float:
    """Fraction of n mismatch draws e with |x^H (a + e)| >= 1.

    ``sampler`` is a mismatch spec (see :mod:`mimobeam.mismatch`) or a
    callable ``(rng, size) -> (size, dim) array``.
    """
    from . import mismatch as mm
    if n < 1:
        raise ValueError("need at least one draw")
    x = np.asarray(x, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if callable(sampler):
        E = np.asarray(sampler(rng, n))
    else:
        E = mm.draw(sampler, angle_deg, rng, size=n)
    vals = np.abs((a[None, :] + E) @ x.conj())
    return float(np.mean(vals >= 1.0))
