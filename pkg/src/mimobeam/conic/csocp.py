"""Modeling layer for second-order cone programs posed over complex data.

Supported shapes (x is a complex decision vector):

* objective: ``min ||F x + g||`` or ``min x^H Q x`` (via its PSD square
  root; the reported objective is the squared norm in the quadratic case),
* cone constraints ``||A x + b|| <= Re(c^H x) + d``,
* scalar constraints ``Re(c^H x) + d >= 0``,
* equalities ``Re(c^H x) = r`` and ``Im(c^H x) = r``.

Everything is reified to a real :class:`ConicProblem` through the standard
embedding (phase rotations of x are resolved by the caller's Im(.)=0
constraints, which is what makes these complex programs real-representable).
"""

import dataclasses

import numpy as np

from .. import linalg
from .ipm import solve as conic_solve
from .problem import (ConicProblem, ConicSolution, NonnegativeCone,
                      SecondOrderCone, SolverSettings, SolveStatus)


@dataclasses.dataclass
class ComplexSolution:
    status: SolveStatus
    x: np.ndarray | None
    objective: float
    conic: ConicSolution

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


class ComplexSocp:
    def __init__(self, dim: int):
        self.dim = dim
        self._obj = None          # (F_emb, g_emb, squared)
        self._socs = []           # (A_emb, b_emb, c_row, d)
        self._ineqs = []          # (c_row, d)
        self._eqs = []            # (row, rhs)

    # -- objective -----------------------------------------------------------
    def minimize_norm(self, F, g=None):
        F = np.atleast_2d(np.asarray(F, dtype=complex))
        g = np.zeros(F.shape[0], dtype=complex) if g is None \
            else np.asarray(g, dtype=complex)
        self._obj = (linalg.embed_matrix(F), linalg.embed_vector(g), False)
        return self

    def minimize_quad(self, Q):
        """min x^H Q x for Hermitian PSD Q; objective reported squared."""
        S = linalg.hermitian_sqrt(Q)
        self._obj = (linalg.embed_matrix(S), np.zeros(2 * Q.shape[0]), True)
        return self

    # -- constraints ----------------------------------------------------------
    def add_soc(self, A, b, c, d):
        """||A x + b|| <= Re(c^H x) + d"""
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        b = np.asarray(b, dtype=complex).ravel()
        self._socs.append((linalg.embed_matrix(A), linalg.embed_vector(b),
                           linalg.real_part_row(c), float(d)))
        return self

    def add_real_ineq(self, c, d):
        """Re(c^H x) + d >= 0"""
        self._ineqs.append((linalg.real_part_row(c), float(d)))
        return self

    def add_real_eq(self, c, r):
        self._eqs.append((linalg.real_part_row(c), float(r)))
        return self

    def add_imag_eq(self, c, r):
        self._eqs.append((linalg.imag_part_row(c), float(r)))
        return self

    # -- reification -----------------------------------------------------------
    def to_conic(self) -> ConicProblem:
        if self._obj is None:
            raise ValueError("objective not set")
        nf = 2 * self.dim
        Fe, ge, _ = self._obj
        cones = [SecondOrderCone(1 + Fe.shape[0])]
        n = nf + 1 + Fe.shape[0]
        t_index = nf
        soc_slots = []
        for Ae, be, crow, d in self._socs:
            cones.append(SecondOrderCone(1 + Ae.shape[0]))
            soc_slots.append(n)
            n += 1 + Ae.shape[0]
        if self._ineqs:
            cones.append(NonnegativeCone(len(self._ineqs)))
            ineq_start = n
            n += len(self._ineqs)

        rows = []
        rhs = []

        def add_row(row, r):
            rows.append(row)
            rhs.append(r)

        # objective epigraph tail: u0 = Fe x + ge
        for i in range(Fe.shape[0]):
            row = np.zeros(n)
            row[:nf] = -Fe[i]
            row[t_index + 1 + i] = 1.0
            add_row(row, ge[i])
        # cone constraints: head = Re(c^H x) + d, tail = Ae x + be
        for (Ae, be, crow, d), start in zip(self._socs, soc_slots):
            row = np.zeros(n)
            row[:nf] = -crow
            row[start] = 1.0
            add_row(row, d)
            for i in range(Ae.shape[0]):
                row = np.zeros(n)
                row[:nf] = -Ae[i]
                row[start + 1 + i] = 1.0
                add_row(row, be[i])
        # scalar inequalities: slack = Re(c^H x) + d
        for j, (crow, d) in enumerate(self._ineqs):
            row = np.zeros(n)
            row[:nf] = -crow
            row[ineq_start + j] = 1.0
            add_row(row, d)
        # equalities on x directly
        for crow, r in self._eqs:
            row = np.zeros(n)
            row[:nf] = crow
            add_row(row, r)

        c_vec = np.zeros(n)
        c_vec[t_index] = 1.0
        A = np.vstack(rows) if rows else np.zeros((0, n))
        problem = ConicProblem(c_vec, A, np.asarray(rhs), tuple(cones),
                               num_free=nf)
        problem.meta["x_slice"] = slice(0, nf)
        problem.meta["t_index"] = t_index
        return problem

    def solve(self, settings: SolverSettings | None = None) -> ComplexSolution:
        problem = self.to_conic()
        sol = conic_solve(problem, settings)
        squared = self._obj[2]
        if sol.x is not None and np.isfinite(sol.x).all():
            # best candidate is exposed even on non-optimal statuses so that
            # callers may salvage near-converged iterates
            x = linalg.lift_vector(sol.x[problem.meta["x_slice"]])
            t = sol.x[problem.meta["t_index"]]
            obj = t * t if squared else t
        else:
            x, obj = None, np.nan
        return ComplexSolution(sol.status, x, obj, sol)
