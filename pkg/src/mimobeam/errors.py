"""Exception types shared across the package."""


class MimobeamError(Exception):
    """Base class for package errors."""


class NotPSDError(MimobeamError):
    """A matrix required to be positive semidefinite is not (an eigenvalue
    falls below -1e-10 * trace)."""


class DimensionMismatchError(MimobeamError):
    """Operands have incompatible dimensions."""


class ZeroWeightError(MimobeamError):
    """A beamforming weight vector is (numerically) zero."""


class SingularMatrixError(MimobeamError):
    """A matrix is too ill-conditioned to invert reliably."""


class InfeasibleError(MimobeamError):
    """A design problem has no feasible point."""


class SolverFailureError(MimobeamError):
    """The conic solver could not certify a solution (iteration limit or
    numerical breakdown) for a design subproblem."""


class NonpositiveMarginError(MimobeamError):
    """The fixed-block robustness margin is nonpositive, so the coupled
    constraint cannot be linearized at the current iterate."""


class MomentMismatchError(MimobeamError):
    """A candidate sampler fails its declared mean/covariance moments."""


class ConfigError(MimobeamError):
    """An experiment configuration violates its invariants."""
