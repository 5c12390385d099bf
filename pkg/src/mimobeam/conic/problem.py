"""Problem and solution containers for the embedded conic solver.

A :class:`ConicProblem` is the real-valued standard form

    minimize    c' x
    subject to  A x = b
                x[num_free:] in  K1 x K2 x ... (ordered cone blocks)

where the leading ``num_free`` variables are unconstrained and the cone
blocks partition the remaining slack vector.  Supported blocks:

* ``NonnegativeCone(dim)`` - entrywise nonnegative,
* ``SecondOrderCone(dim)`` - (t, u) with t >= ||u||, dim = 1 + len(u),
* ``PsdCone(order)``       - symmetric order x order matrix, stored in
  scaled-lower-triangle ("svec") packing occupying order*(order+1)/2 slots.

The svec packing stacks the lower triangle column by column with
off-diagonal entries scaled by sqrt(2), so that the packed inner product
equals the matrix trace inner product.
"""

import dataclasses
import enum

import numpy as np

_SQRT2 = np.sqrt(2.0)


@dataclasses.dataclass(frozen=True)
class NonnegativeCone:
    dim: int

    @property
    def slots(self) -> int:
        return self.dim

    @property
    def degree(self) -> int:
        return self.dim


@dataclasses.dataclass(frozen=True)
class SecondOrderCone:
    dim: int  # 1 + tail length

    @property
    def slots(self) -> int:
        return self.dim

    @property
    def degree(self) -> int:
        return 1


@dataclasses.dataclass(frozen=True)
class PsdCone:
    order: int  # matrix side

    @property
    def slots(self) -> int:
        return self.order * (self.order + 1) // 2

    @property
    def degree(self) -> int:
        return self.order


Cone = NonnegativeCone | SecondOrderCone | PsdCone


def svec_dim(order: int) -> int:
    return order * (order + 1) // 2


def svec(X: np.ndarray) -> np.ndarray:
    """Pack a symmetric matrix; <svec(X), svec(Y)> == trace(X Y)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    out = np.empty(svec_dim(n))
    k = 0
    for j in range(n):
        out[k] = X[j, j]
        k += 1
        out[k:k + n - j - 1] = _SQRT2 * X[j + 1:, j]
        k += n - j - 1
    return out


def smat(x: np.ndarray, order: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    X = np.zeros((order, order))
    k = 0
    for j in range(order):
        X[j, j] = x[k]
        k += 1
        col = x[k:k + order - j - 1] / _SQRT2
        X[j + 1:, j] = col
        X[j, j + 1:] = col
        k += order - j - 1
    return X


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclasses.dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-8
    max_iterations: int = 200
    static_regularization: float = 1e-9
    backend: str = "auto"  # auto | python | compiled

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclasses.dataclass
class ConicProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cones: tuple
    num_free: int = 0
    meta: dict = dataclasses.field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.c = np.ascontiguousarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.ascontiguousarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.ascontiguousarray(self.b, dtype=float).ravel()
        self.cones = tuple(self.cones)
        if self.b.size != self.A.shape[0]:
            raise ValueError("b length must match A rows")
        if self.num_free < 0:
            raise ValueError("num_free must be nonnegative")
        slots = sum(k.slots for k in self.cones)
        if self.num_free + slots != n:
            raise ValueError(
                f"free ({self.num_free}) + cone ({slots}) slots must cover "
                f"all {n} variables")
        if not (np.isfinite(self.c).all() and np.isfinite(self.A).all()
                and np.isfinite(self.b).all()):
            raise ValueError("problem data must be finite")

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_eq(self) -> int:
        return self.A.shape[0]

    @property
    def cone_slots(self) -> int:
        return self.num_vars - self.num_free


@dataclasses.dataclass
class ConicSolution:
    status: SolveStatus
    x: np.ndarray
    y: np.ndarray          # multipliers of A x = b
    z: np.ndarray          # cone duals (aligned with x; zero on free slots)
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    gap: float

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL
