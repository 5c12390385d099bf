"""Uniform-linear-array steering vectors, virtual (Kronecker) steering
vectors for colocated transmit/receive arrays, and the deterministic bound on
the virtual steering-vector mismatch norm."""

import dataclasses

import numpy as np

from . import linalg


@dataclasses.dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count and spacing in wavelengths."""
    elements: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError("element count must be >= 1")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")


@dataclasses.dataclass(frozen=True)
class SteeringVector:
    angle_deg: float
    response: np.ndarray  # complex, unit-modulus entries, response[0] == 1


def steering(geom: ArrayGeometry, angle_deg: float) -> SteeringVector:
    """Array response at ``angle_deg`` (broadside = 0, in [-90, 90]).

    Element m responds with exp(j * 2*pi * spacing * m * sin(angle)); the
    phase reference is element 0.
    """
    if not -90.0 <= angle_deg <= 90.0:
        raise ValueError(f"angle {angle_deg} outside [-90, 90] degrees")
    m = np.arange(geom.elements)
    phase = 2.0 * np.pi * geom.spacing * m * np.sin(np.deg2rad(angle_deg))
    return SteeringVector(angle_deg, np.exp(1j * phase))


def virtual_steering(a_t: SteeringVector | np.ndarray,
                     a_r: SteeringVector | np.ndarray) -> np.ndarray:
    """Virtual-array steering vector a_t (x) a_r of dimension M_t * M_r."""
    at = a_t.response if isinstance(a_t, SteeringVector) else np.asarray(a_t)
    ar = a_r.response if isinstance(a_r, SteeringVector) else np.asarray(a_r)
    return linalg.kron(at, ar)


def mismatch_norm_bound(eps_t: float, eps_r: float, m_t: int, m_r: int) -> float:
    """Worst-case norm of the virtual steering mismatch when the transmit and
    receive mismatches are bounded by eps_t and eps_r in Euclidean norm:

        sqrt(M_t) * eps_r + sqrt(M_r) * eps_t + eps_t * eps_r
    """
    if eps_t < 0 or eps_r < 0:
        raise ValueError("mismatch radii must be nonnegative")
    return np.sqrt(m_t) * eps_r + np.sqrt(m_r) * eps_t + eps_t * eps_r
