"""Distribution-free lower bound on the beamformer response probability.

For a weight v, presumed steering a, and mismatch covariance C, the quantity

    inf  Pr{ |v^H (a + e)| >= 1 }

over all zero-mean distributions of e with E[e e^H] = C is computed through
its Lagrangian dual: a semidefinite program over a Hermitian matrix Z and a
multiplier lam >= 0,

    maximize  tr(Z Ct)   s.t.  Z <= diag(0,...,0,1),   Z <= lam * A,

where Ct = blkdiag(C, 1) and A encodes the quadratic response-threshold set
(the implication between the two quadratics is handled by the S-procedure
with an existential multiplier).  Weak duality makes any feasible value a
certified lower bound on every moment-matched distribution's probability.

Complex Hermitian semidefinite constraints are reified to real symmetric
blocks of doubled dimension so the conic solver stays real.
"""

import dataclasses

import numpy as np
import scipy.stats

from . import linalg, mismatch
from .conic import (ConicProblem, NonnegativeCone, PsdCone, SolverSettings,
                    SolveStatus, svec, svec_dim)
from .conic.ipm import solve as conic_solve
from .errors import DimensionMismatchError, MomentMismatchError

_BOUND_SETTINGS = SolverSettings(tolerance=1e-8, max_iterations=200)


def assemble_dual_data(v: np.ndarray, a: np.ndarray,
                       C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bordered matrices (A, Ct) entering the dual semidefinite program."""
    v = np.asarray(v, dtype=complex).ravel()
    a = np.asarray(a, dtype=complex).ravel()
    C = np.asarray(C, dtype=complex)
    n = v.size
    if a.size != n or C.shape != (n, n):
        raise DimensionMismatchError("v, a, C dimensions disagree")
    vva = np.outer(v, v.conj())
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[:n, :n] = vva
    A[:n, n] = vva @ a
    A[n, :n] = (vva @ a).conj()
    A[n, n] = abs(np.vdot(v, a)) ** 2 - 1.0
    Ct = np.zeros((n + 1, n + 1), dtype=complex)
    Ct[:n, :n] = C
    Ct[n, n] = 1.0
    return linalg.hermitianize(A), linalg.hermitianize(Ct)


def _hermitian_basis(n):
    """Real basis of the Hermitian matrices of order n (n^2 elements)."""
    basis = []
    for i in range(n):
        B = np.zeros((n, n), dtype=complex)
        B[i, i] = 1.0
        basis.append(B)
    for i in range(n):
        for j in range(i + 1, n):
            B = np.zeros((n, n), dtype=complex)
            B[i, j] = B[j, i] = 1.0
            basis.append(B)
            B = np.zeros((n, n), dtype=complex)
            B[i, j] = 1.0j
            B[j, i] = -1.0j
            basis.append(B)
    return basis


@dataclasses.dataclass
class DualCertificate:
    Z: np.ndarray            # Hermitian, order n+1
    lam: float
    bound: float             # clipped to [0, 1]
    raw_value: float
    psd_margins: tuple       # max eigenvalues of (Z - E) and (Z - lam A)
    status: SolveStatus
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def tight_lower_bound(v, a, C,
                      settings: SolverSettings | None = None) -> DualCertificate:
    """Solve the dual SDP; the certificate value lower-bounds the response
    probability of every zero-mean mismatch distribution with covariance C."""
    settings = settings or _BOUND_SETTINGS
    A, Ct = assemble_dual_data(v, a, C)
    n1 = A.shape[0]
    D = 2 * n1
    sdim = svec_dim(D)
    basis = _hermitian_basis(n1)
    npar = len(basis)

    emb_cols = np.column_stack(
        [svec(linalg.embed_matrix(B)) for B in basis])
    E = np.zeros((n1, n1))
    E[n1 - 1, n1 - 1] = 1.0
    svec_E = svec(linalg.embed_matrix(E))
    svec_A = svec(linalg.embed_matrix(A))

    # variables: [p (npar free), lam (nonneg 1), S1 (psd), S2 (psd)]
    nv = npar + 1 + 2 * sdim
    rows = np.zeros((2 * sdim, nv))
    rhs = np.zeros(2 * sdim)
    # S1 = emb(E - Z):  S1 + emb(Z) = emb(E)
    rows[:sdim, :npar] = emb_cols
    rows[:sdim, npar + 1:npar + 1 + sdim] = np.eye(sdim)
    rhs[:sdim] = svec_E
    # S2 = emb(lam A - Z):  S2 - lam emb(A) + emb(Z) = 0
    rows[sdim:, :npar] = emb_cols
    rows[sdim:, npar] = -svec_A
    rows[sdim:, npar + 1 + sdim:] = np.eye(sdim)

    obj = np.zeros(nv)
    obj[:npar] = [-np.real(np.trace(B @ Ct)) for B in basis]  # maximize

    problem = ConicProblem(obj, rows, rhs,
                           (NonnegativeCone(1), PsdCone(D), PsdCone(D)),
                           num_free=npar)
    sol = conic_solve(problem, settings)

    Z = np.zeros((n1, n1), dtype=complex)
    for coef, B in zip(sol.x[:npar], basis):
        Z += coef * B
    lam = float(sol.x[npar])
    raw = float(np.real(np.trace(Z @ Ct)))
    m1 = float(np.linalg.eigvalsh(linalg.hermitianize(Z - E))[-1])
    m2 = float(np.linalg.eigvalsh(linalg.hermitianize(Z - lam * A))[-1])
    return DualCertificate(Z=Z, lam=lam, bound=float(np.clip(raw, 0.0, 1.0)),
                           raw_value=raw, psd_margins=(m1, m2),
                           status=sol.status, iterations=sol.iterations)


def exact_gaussian_probability(v, a, C) -> float:
    """Pr{ |v^H (a + e)| >= 1 } for e ~ CN(0, C), via the noncentral
    chi-square tail (Marcum Q)."""
    v = np.asarray(v, dtype=complex)
    a = np.asarray(a, dtype=complex)
    m = abs(np.vdot(v, a))
    s2 = float(np.real(np.vdot(v, np.asarray(C, dtype=complex) @ v)))
    if s2 <= 0.0:
        return 1.0 if m >= 1.0 else 0.0
    # |v^H(a+e)|^2 / (s2/2) is noncentral chi-square, 2 dof
    return float(scipy.stats.ncx2.sf(1.0 / (s2 / 2.0), df=2,
                                     nc=m * m / (s2 / 2.0)))


# ---------------------------------------------------------------------------
# moment-matched adversarial samplers
# ---------------------------------------------------------------------------

def gaussian_sampler(C):
    def draw(rng, n):
        return mismatch.draw_gaussian(C, rng, size=n)
    return draw


def two_point_sampler(C):
    """e = +-sqrt(dim) C^{1/2} s with s uniform on the complex unit sphere."""
    root = linalg.hermitian_sqrt(C)
    dim = C.shape[0]

    def draw(rng, n):
        z = mismatch._standard_complex_normal(rng, (n, dim))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        signs = rng.integers(0, 2, n) * 2.0 - 1.0
        return np.sqrt(dim) * signs[:, None] * (z @ root.T)
    return draw


def uniform_phase_sampler(C):
    """e = exp(j phi) sqrt(dim) C^{1/2} s, phi uniform on [0, 2 pi)."""
    root = linalg.hermitian_sqrt(C)
    dim = C.shape[0]

    def draw(rng, n):
        z = mismatch._standard_complex_normal(rng, (n, dim))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n))
        return np.sqrt(dim) * phases[:, None] * (z @ root.T)
    return draw


@dataclasses.dataclass
class SamplerCheck:
    name: str
    empirical: float
    slack: float
    passed: bool


@dataclasses.dataclass
class AdversarialReport:
    bound: float
    checks: list

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def adversarial_probability_check(v, a, C, certificate: DualCertificate,
                                  samplers, n: int,
                                  rng: np.random.Generator) -> AdversarialReport:
    """Verify the certified bound against moment-matched samplers.

    Each sampler must be zero-mean with covariance C (checked empirically;
    MomentMismatchError otherwise).  The empirical probability of each must
    then exceed the bound minus a 3-sigma binomial allowance.
    """
    v = np.asarray(v, dtype=complex)
    a = np.asarray(a, dtype=complex)
    C = np.asarray(C, dtype=complex)
    checks = []
    for name, draw in samplers:
        E = np.asarray(draw(rng, n))
        mean = E.mean(axis=0)
        cov = mismatch.estimate_covariance(E) - np.outer(mean, mean.conj())
        scale = max(np.linalg.norm(C), 1e-12)
        mc_tol = 10.0 / np.sqrt(n)
        if np.linalg.norm(mean) > mc_tol * np.sqrt(scale) + 1e-9 \
                or np.linalg.norm(cov - C) > mc_tol * scale + 1e-9:
            raise MomentMismatchError(
                f"sampler {name!r} does not match the declared moments")
        emp = float(np.mean(np.abs((a[None, :] + E) @ v.conj()) >= 1.0))
        sigma = np.sqrt(max(emp * (1.0 - emp), 1.0 / n) / n)
        passed = emp >= certificate.bound - 3.0 * sigma
        checks.append(SamplerCheck(name, emp, 3.0 * sigma, passed))
    return AdversarialReport(certificate.bound, checks)


def default_samplers(C):
    return [("gaussian", gaussian_sampler(C)),
            ("two-point", two_point_sampler(C)),
            ("uniform-phase", uniform_phase_sampler(C))]
