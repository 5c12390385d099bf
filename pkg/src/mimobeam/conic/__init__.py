"""Small dense conic solver: linear objective over nonnegative, second-order,
and semidefinite cones with equality constraints."""

from .backend import active_backend_name, compiled_available
from .csocp import ComplexSocp, ComplexSolution
from .dump import dump_problem, load_problem
from .ipm import solve
from .problem import (ConicProblem, ConicSolution, NonnegativeCone, PsdCone,
                      SecondOrderCone, SolverSettings, SolveStatus, smat,
                      svec, svec_dim)

__all__ = [
    "ComplexSocp", "ComplexSolution", "ConicProblem", "ConicSolution",
    "NonnegativeCone", "PsdCone", "SecondOrderCone", "SolveStatus",
    "SolverSettings", "active_backend_name", "compiled_available",
    "dump_problem", "load_problem", "smat", "solve", "svec", "svec_dim",
]
