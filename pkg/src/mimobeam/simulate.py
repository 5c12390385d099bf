"""Virtual-array snapshot synthesis and SINR scoring.

Snapshots are generated directly in post-matched-filter virtual form: each
pulse is a sum of per-source reflection coefficients times the source's
virtual steering vector, plus white noise.  Reflection coefficients vary
independently from pulse to pulse.
"""

import dataclasses

import numpy as np

from .arrays import ArrayGeometry
from .errors import DimensionMismatchError, ZeroWeightError
from .mismatch import MismatchSpec, _standard_complex_normal


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclasses.dataclass(frozen=True)
class Interferer:
    angle_deg: float
    inr_db: float


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """One simulated engagement: a target, interferers, noise, and the
    mismatch model applied to the target's transmit/receive steering."""
    target_angle_deg: float
    target_snr_db: float
    interferers: tuple
    tx: ArrayGeometry
    rx: ArrayGeometry
    tx_mismatch: MismatchSpec
    rx_mismatch: MismatchSpec
    noise_power: float = 1.0
    snapshots: int = 100
    signal_in_training: bool = True

    def __post_init__(self):
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")
        if self.noise_power <= 0 or not np.isfinite(self.noise_power):
            raise ValueError("noise power must be positive and finite")
        for ang in [self.target_angle_deg] + [i.angle_deg for i in self.interferers]:
            if not -90.0 <= ang <= 90.0:
                raise ValueError(f"angle {ang} outside [-90, 90]")

    @property
    def virtual_dim(self) -> int:
        return self.tx.elements * self.rx.elements

    def source_powers(self) -> np.ndarray:
        """Per-source signal power [target, interferers...] relative to noise:
        sigma_i^2 = 10^(x/10) * noise_power with x the SNR or INR in dB."""
        levels = [self.target_snr_db] + [i.inr_db for i in self.interferers]
        return self.noise_power * np.array([db_to_linear(v) for v in levels])


def synthesize_snapshots(cfg: ScenarioConfig, actual_steering,
                         rng: np.random.Generator) -> np.ndarray:
    """Simulate L virtual snapshots; returns an (M_t*M_r, L) array.

    ``actual_steering`` lists the realized virtual steering vectors aligned
    with [target, interferers...].  Reflection coefficients are i.i.d.
    circular Gaussian across pulses with per-source variances from
    ``cfg.source_powers``; noise is white with power ``cfg.noise_power``.
    When ``signal_in_training`` is off the target column is zeroed but its
    coefficient draws still advance the stream, so the interference and noise
    realizations are unchanged by the flag.
    """
    d = np.atleast_2d(np.asarray(actual_steering, dtype=complex))
    n_src = 1 + len(cfg.interferers)
    if d.shape != (n_src, cfg.virtual_dim):
        raise DimensionMismatchError(
            f"expected {n_src} steering vectors of dim {cfg.virtual_dim}, "
            f"got {d.shape}")
    L = cfg.snapshots
    amps = np.sqrt(cfg.source_powers())
    beta = _standard_complex_normal(rng, (n_src, L)) * amps[:, None]
    if not cfg.signal_in_training:
        beta[0] = 0.0
    noise = np.sqrt(cfg.noise_power) * _standard_complex_normal(
        rng, (cfg.virtual_dim, L))
    return d.T @ beta + noise


def sample_covariance(snapshots: np.ndarray) -> np.ndarray:
    """R_hat = (1/L) sum_tau y(tau) y(tau)^H over the snapshot columns."""
    Y = np.atleast_2d(np.asarray(snapshots, dtype=complex))
    L = Y.shape[1]
    if L < 1:
        raise DimensionMismatchError("need at least one snapshot")
    R = (Y @ Y.conj().T) / L
    return 0.5 * (R + R.conj().T)


def true_in_covariance(cfg: ScenarioConfig, interferer_steering) -> np.ndarray:
    """Exact interference-plus-noise covariance: sum_i sigma_i^2 d_i d_i^H
    over interferers plus noise_power * I."""
    dim = cfg.virtual_dim
    R = cfg.noise_power * np.eye(dim, dtype=complex)
    powers = cfg.source_powers()[1:]
    steer = np.atleast_2d(np.asarray(interferer_steering, dtype=complex)) \
        if len(cfg.interferers) else np.zeros((0, dim), dtype=complex)
    if steer.shape[0] != len(cfg.interferers):
        raise DimensionMismatchError("one steering vector per interferer")
    for p, d in zip(powers, steer):
        R += p * np.outer(d, d.conj())
    return R


def output_sinr_db(w: np.ndarray, d_target: np.ndarray, sigma_s2: float,
                   R_in: np.ndarray) -> float:
    """10*log10( sigma_s^2 |w^H d|^2 / (w^H R_in w) )."""
    w = np.asarray(w, dtype=complex)
    nrm = np.linalg.norm(w)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ZeroWeightError("weight vector is zero or non-finite")
    num = sigma_s2 * abs(np.vdot(w, d_target)) ** 2
    den = float(np.real(np.vdot(w, R_in @ w)))
    return 10.0 * np.log10(num / den)
