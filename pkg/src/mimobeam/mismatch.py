"""Stochastic steering-vector mismatch generators and empirical second-moment
estimation.

Two generator families are supported: zero-mean circular complex Gaussian
errors with a given covariance, and a Ricean scatter model where the error is
a sum of N random-phase plane-wave components around the nominal angle.
"""

import dataclasses

import numpy as np

from . import linalg
from .arrays import ArrayGeometry
from .errors import DimensionMismatchError


@dataclasses.dataclass(frozen=True)
class GaussianMismatch:
    """e ~ CN(0, covariance)."""
    covariance: np.ndarray


@dataclasses.dataclass(frozen=True)
class RiceanMismatch:
    """Sum of ``nlos_count`` scattered components with uniform random phases
    and angular offsets uniform in [-angular_halfwidth_deg, +...]; ``power``
    is the total scattered power sigma^2 = E||e||^2."""
    power: float
    nlos_count: int
    angular_halfwidth_deg: float
    geometry: ArrayGeometry

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")
        if self.nlos_count < 1:
            raise ValueError("need at least one scattered component")
        if self.angular_halfwidth_deg < 0:
            raise ValueError("angular halfwidth must be nonnegative")


MismatchSpec = GaussianMismatch | RiceanMismatch


def _standard_complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        / np.sqrt(2.0)


def draw_gaussian(C: np.ndarray, rng: np.random.Generator,
                  size: int | None = None) -> np.ndarray:
    """Draw e = C^(1/2) z with z standard circular complex Gaussian.

    Returns a vector, or a ``(size, dim)`` array when ``size`` is given.
    """
    C = np.asarray(C, dtype=complex)
    root = linalg.hermitian_sqrt(C)
    n = C.shape[0]
    if size is None:
        return root @ _standard_complex_normal(rng, n)
    z = _standard_complex_normal(rng, (size, n))
    return z @ root.T  # root symmetric up to conj; (root @ z_k) rows


_RICEAN_CHUNK = 20000


def draw_ricean(spec: RiceanMismatch, angle_deg: float,
                rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw the scattered-component mismatch around ``angle_deg``."""
    one = size is None
    count = 1 if one else size
    m = spec.geometry.elements
    n = spec.nlos_count
    scale = np.sqrt(spec.power / (m * n))
    elem = np.arange(m)
    out = np.empty((count, m), dtype=complex)
    for lo in range(0, count, _RICEAN_CHUNK):
        hi = min(lo + _RICEAN_CHUNK, count)
        k = hi - lo
        psi = rng.uniform(0.0, 2.0 * np.pi, (k, n))
        offsets = rng.uniform(-spec.angular_halfwidth_deg,
                              spec.angular_halfwidth_deg, (k, n))
        # (k, n, m) phases of each scattered component's steering vector
        phases = (2.0 * np.pi * spec.geometry.spacing
                  * np.sin(np.deg2rad(angle_deg + offsets))[:, :, None] * elem)
        comps = np.exp(1j * (phases + psi[:, :, None]))
        out[lo:hi] = scale * comps.sum(axis=1)
    return out[0] if one else out


def draw(spec: MismatchSpec, angle_deg: float, rng: np.random.Generator,
         size: int | None = None) -> np.ndarray:
    """Dispatch on the mismatch family (Gaussian draws ignore the angle)."""
    if isinstance(spec, GaussianMismatch):
        return draw_gaussian(spec.covariance, rng, size)
    return draw_ricean(spec, angle_deg, rng, size)


def estimate_covariance(samples) -> np.ndarray:
    """Second-moment estimate (1/K) sum_k e_k e_k^H; Hermitian PSD."""
    E = np.atleast_2d(np.asarray(samples, dtype=complex))
    if E.size == 0:
        raise DimensionMismatchError("need at least one sample")
    C = (E.T @ E.conj()) / E.shape[0]  # rows are samples: C_ij = E[e_i e_j*]
    return linalg.hermitianize(C)
