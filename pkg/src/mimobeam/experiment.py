"""Monte-Carlo harness: sweep SNR, design weights with every configured
method on the same per-trial data, and aggregate mean output SINR.

Per (SNR, trial): draw the transmit/receive steering mismatches, synthesize
training snapshots (all methods in a trial see the same snapshot set), form
the regularized sample covariance, design, and score each weight against the
actual mismatched target steering and the exact interference-plus-noise
covariance.  Draws are keyed by (seed, trial, purpose) counter streams, so
results are bit-stable and the first k trials do not depend on how many
trials were requested.
"""

import concurrent.futures
import dataclasses
import hashlib

import numpy as np

from . import __version__, arrays, beamform, linalg, mismatch, simulate
from .conic.backend import active_backend_name
from .errors import (ConfigError, InfeasibleError, NonpositiveMarginError,
                     SingularMatrixError, SolverFailureError)
from .rngstreams import stream

_DESIGN_FAILURES = (InfeasibleError, NonpositiveMarginError,
                    SingularMatrixError, SolverFailureError)


# ---------------------------------------------------------------------------
# method descriptors
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Smi:
    name: str = dataclasses.field(default="smi", init=False)


@dataclasses.dataclass(frozen=True)
class Lsmi:
    loading: float = 10.0
    name: str = dataclasses.field(default="lsmi", init=False)


@dataclasses.dataclass(frozen=True)
class WorstCase:
    epsilon: float = 9.0
    name: str = dataclasses.field(default="worst_case", init=False)


def _split_eta(p, eta1, eta2):
    if eta2 is None:
        eta2 = p / eta1
    if not (0 < eta1 < 1 and 0 < eta2 < 1):
        raise ConfigError("per-side confidence levels must lie in (0, 1)")
    if abs(eta1 * eta2 - p) > 1e-9:
        raise ConfigError(
            f"eta1 * eta2 = {eta1 * eta2!r} must equal p = {p!r}")
    return eta2


@dataclasses.dataclass(frozen=True)
class ProbGaussian:
    p: float = 0.9
    eta1: float = 0.93
    eta2: float | None = None
    name: str = dataclasses.field(default="prob_gaussian", init=False)

    def __post_init__(self):
        object.__setattr__(self, "eta2", _split_eta(self.p, self.eta1,
                                                    self.eta2))


@dataclasses.dataclass(frozen=True)
class ProbChebyshev:
    p: float = 0.9
    eta1: float = 0.93
    eta2: float | None = None
    name: str = dataclasses.field(default="prob_chebyshev", init=False)

    def __post_init__(self):
        object.__setattr__(self, "eta2", _split_eta(self.p, self.eta1,
                                                    self.eta2))


MethodSpec = Smi | Lsmi | WorstCase | ProbGaussian | ProbChebyshev


# ---------------------------------------------------------------------------
# experiment configuration
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    scenario: simulate.ScenarioConfig   # target_snr_db is overridden per grid point
    methods: tuple
    snr_grid_db: tuple
    trials: int
    seed: int
    covariance_draws: int = 10000
    design_covariance: str = "white"    # white | estimated
    average: str = "db"                 # db | linear
    jobs: int = 1

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.snr_grid_db:
            raise ConfigError("SNR grid must be nonempty")
        if not self.methods:
            raise ConfigError("at least one method is required")
        if self.design_covariance not in ("white", "estimated"):
            raise ConfigError(
                f"unknown design covariance mode {self.design_covariance!r}")
        if self.average not in ("linear", "db"):
            raise ConfigError(f"unknown averaging mode {self.average!r}")
        if self.covariance_draws < 1:
            raise ConfigError("covariance_draws must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate method names")


@dataclasses.dataclass(frozen=True)
class ResultRow:
    snr_db: float
    method: str
    mean_sinr_db: float
    stderr_db: float
    trials_ok: int
    trials_failed: int


@dataclasses.dataclass
class ResultTable:
    rows: list

    def by_method(self, method: str) -> dict:
        return {r.snr_db: r for r in self.rows if r.method == method}


# ---------------------------------------------------------------------------
# design-side covariance of the steering mismatch
# ---------------------------------------------------------------------------

def design_covariance(spec: mismatch.MismatchSpec, mode: str,
                      angle_deg: float, draws: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Second-moment matrix handed to the probability-constrained designs.

    Gaussian mismatch: its covariance is known, use it directly.  Scattered
    (Ricean) mismatch: ``white`` uses the power-matched isotropic matrix
    (power/M) * I, ``estimated`` uses the empirical second moment of
    ``draws`` offline realizations.
    """
    if isinstance(spec, mismatch.GaussianMismatch):
        return np.asarray(spec.covariance, dtype=complex)
    if mode == "white":
        m = spec.geometry.elements
        return (spec.power / m) * np.eye(m, dtype=complex)
    samples = mismatch.draw_ricean(spec, angle_deg, rng, size=draws)
    return mismatch.estimate_covariance(samples)


# ---------------------------------------------------------------------------
# per-trial work
# ---------------------------------------------------------------------------

def _design(method, R, d_nom, a_t, a_r, C_t, C_r):
    if isinstance(method, Smi):
        return beamform.smi(R, d_nom).w
    if isinstance(method, Lsmi):
        return beamform.lsmi(R, d_nom, method.loading).w
    if isinstance(method, WorstCase):
        return beamform.worst_case(R, d_nom, method.epsilon).w
    variant = "gaussian" if isinstance(method, ProbGaussian) else "chebyshev"
    res = beamform.design_probability_constrained(
        R, a_t, a_r, C_t, C_r, method.eta1, method.eta2, variant)
    return res.weights.w


def _run_trial(cfg: ExperimentConfig, statics, trial: int):
    """All (snr, method) results of one Monte-Carlo trial."""
    a_t, a_r, d_nom, interferer_steering, C_t, C_r = statics
    scenario = cfg.scenario
    rng_t = stream(cfg.seed, trial, "mismatch-tx")
    rng_r = stream(cfg.seed, trial, "mismatch-rx")
    e_t = mismatch.draw(scenario.tx_mismatch, scenario.target_angle_deg, rng_t)
    e_r = mismatch.draw(scenario.rx_mismatch, scenario.target_angle_deg, rng_r)
    d_act = linalg.kron(a_t + e_t, a_r + e_r)
    steering = np.vstack([d_act[None, :], interferer_steering]) \
        if len(interferer_steering) else d_act[None, :]
    R_in = simulate.true_in_covariance(scenario, interferer_steering)

    out = {}
    for snr_db in cfg.snr_grid_db:
        sc = dataclasses.replace(scenario, target_snr_db=snr_db)
        # restarting the stream per SNR point reuses the same underlying
        # normal draws, so the grid shares common random numbers
        snaps = simulate.synthesize_snapshots(
            sc, steering, stream(cfg.seed, trial, "snapshots"))
        R = beamform.regularize_covariance(simulate.sample_covariance(snaps))
        sigma_s2 = sc.source_powers()[0]
        for method in cfg.methods:
            try:
                w = _design(method, R, d_nom, a_t, a_r, C_t, C_r)
                out[(snr_db, method.name)] = simulate.output_sinr_db(
                    w, d_act, sigma_s2, R_in)
            except _DESIGN_FAILURES:
                out[(snr_db, method.name)] = None
    return out


def _statics(cfg: ExperimentConfig):
    scenario = cfg.scenario
    a_t = arrays.steering(scenario.tx, scenario.target_angle_deg).response
    a_r = arrays.steering(scenario.rx, scenario.target_angle_deg).response
    d_nom = linalg.kron(a_t, a_r)
    inter = np.array([
        arrays.virtual_steering(arrays.steering(scenario.tx, i.angle_deg),
                                arrays.steering(scenario.rx, i.angle_deg))
        for i in scenario.interferers
    ]) if scenario.interferers else np.zeros((0, d_nom.size), dtype=complex)
    C_t = design_covariance(scenario.tx_mismatch, cfg.design_covariance,
                            scenario.target_angle_deg, cfg.covariance_draws,
                            stream(cfg.seed, "cov-est-tx"))
    C_r = design_covariance(scenario.rx_mismatch, cfg.design_covariance,
                            scenario.target_angle_deg, cfg.covariance_draws,
                            stream(cfg.seed, "cov-est-rx"))
    return a_t, a_r, d_nom, inter, C_t, C_r


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Execute the configured sweep; failures of a method in a trial are
    excluded from that method's mean and reported in ``trials_failed``."""
    cfg.validate()
    statics = _statics(cfg)
    if cfg.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(cfg.jobs) as pool:
            futures = {pool.submit(_run_trial, cfg, statics, t): t
                       for t in range(cfg.trials)}
            per_trial = [None] * cfg.trials
            for fut, t in futures.items():
                per_trial[t] = fut.result()
    else:
        per_trial = [_run_trial(cfg, statics, t) for t in range(cfg.trials)]

    rows = []
    for method in sorted(cfg.methods, key=lambda m: m.name):
        for snr_db in cfg.snr_grid_db:
            vals = [r[(snr_db, method.name)] for r in per_trial]
            ok = np.array([v for v in vals if v is not None])
            failed = sum(v is None for v in vals)
            mean_db, stderr_db = _aggregate(ok, cfg.average)
            rows.append(ResultRow(snr_db, method.name, mean_db, stderr_db,
                                  ok.size, failed))
    return ResultTable(rows)


def _aggregate(sinr_db: np.ndarray, average: str):
    if sinr_db.size == 0:
        return float("nan"), float("nan")
    if average == "db":
        mean = float(sinr_db.mean())
        err = float(sinr_db.std(ddof=1) / np.sqrt(sinr_db.size)) \
            if sinr_db.size > 1 else float("nan")
        return mean, err
    lin = 10.0 ** (sinr_db / 10.0)
    mean_lin = lin.mean()
    mean = float(10.0 * np.log10(mean_lin))
    if sinr_db.size > 1:
        stderr_lin = lin.std(ddof=1) / np.sqrt(lin.size)
        err = float(10.0 / np.log(10.0) * stderr_lin / mean_lin)
    else:
        err = float("nan")
    return mean, err


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

CSV_HEADER = "snr_db,method,mean_sinr_db,stderr_db,trials_ok,trials_failed"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_csv(table: ResultTable, path) -> None:
    """UTF-8 CSV, rows sorted by (method, snr_db), 6 significant digits."""
    if not table.rows:
        raise ValueError("result table is empty")
    rows = sorted(table.rows, key=lambda r: (r.method, r.snr_db))
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([_fmt(r.snr_db), r.method, _fmt(r.mean_sinr_db),
                               _fmt(r.stderr_db), str(r.trials_ok),
                               str(r.trials_failed)]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> ResultTable:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    rows = []
    for ln in lines[1:]:
        snr, method, mean, err, ok, failed = ln.split(",")
        rows.append(ResultRow(float(snr), method, float(mean), float(err),
                              int(ok), int(failed)))
    return ResultTable(rows)


def content_hash(path) -> str:
    """Git-style blob hash of a file's bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def flatten_config(cfg: ExperimentConfig) -> dict:
    sc = cfg.scenario
    flat = {
        "seed": cfg.seed,
        "trials": cfg.trials,
        "snr_grid_db": " ".join(_fmt(s) for s in cfg.snr_grid_db),
        "covariance_draws": cfg.covariance_draws,
        "design_covariance": cfg.design_covariance,
        "average": cfg.average,
        "jobs": cfg.jobs,
        "scenario.target_angle_deg": sc.target_angle_deg,
        "scenario.interferers": " ".join(
            f"{i.angle_deg}:{i.inr_db}" for i in sc.interferers),
        "scenario.noise_power": sc.noise_power,
        "scenario.snapshots": sc.snapshots,
        "scenario.signal_in_training": sc.signal_in_training,
        "array.tx_elements": sc.tx.elements,
        "array.rx_elements": sc.rx.elements,
        "array.spacing": sc.tx.spacing,
    }
    tx = sc.tx_mismatch
    if isinstance(tx, mismatch.RiceanMismatch):
        flat["mismatch.kind"] = "ricean"
        flat["mismatch.power"] = tx.power
        flat["mismatch.nlos_components"] = tx.nlos_count
        flat["mismatch.angular_halfwidth_deg"] = tx.angular_halfwidth_deg
    else:
        flat["mismatch.kind"] = "gaussian"
        flat["mismatch.covariance_trace"] = float(
            np.trace(tx.covariance).real)
    for m in cfg.methods:
        for field in dataclasses.fields(m):
            if field.name == "name":
                continue
            flat[f"method.{m.name}.{field.name}"] = getattr(m, field.name)
    return flat


def write_manifest(path, cfg: ExperimentConfig, csv_path) -> None:
    lines = [f"mimobeam_version = {__version__}",
             f"solver_backend = {active_backend_name()}",
             f"csv_blob_sha1 = {content_hash(csv_path)}"]
    for key, value in sorted(flatten_config(cfg).items()):
        lines.append(f"{key} = {value}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
