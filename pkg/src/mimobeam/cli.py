"""Command-line entry point.

Usage:
    mimobeam --config configs/default.cfg --out results.csv
    mimobeam --config configs/default.cfg --bound-demo

Runs the configured Monte-Carlo sweep and writes the result CSV plus a
``<out>.manifest`` key-value file recording the resolved configuration and a
git-style content hash of the CSV.  Exit codes: 0 success, 1 configuration
error, 2 runtime failure.  The config grammar is documented in
``docs/config-format.md``.
"""

import argparse
import configparser
import dataclasses
import sys

import numpy as np

from . import arrays, beamform, bound, experiment, linalg, mismatch, simulate
from .errors import ConfigError, MimobeamError
from .rngstreams import stream

_METHOD_BUILDERS = {
    "smi": lambda opts: experiment.Smi(),
    "lsmi": lambda opts: experiment.Lsmi(loading=float(opts.get("loading", 10.0))),
    "worst_case": lambda opts: experiment.WorstCase(
        epsilon=float(opts.get("epsilon", 9.0))),
    "prob_gaussian": lambda opts: experiment.ProbGaussian(
        p=float(opts.get("p", 0.9)), eta1=float(opts.get("eta1", 0.93)),
        eta2=float(opts["eta2"]) if "eta2" in opts else None),
    "prob_chebyshev": lambda opts: experiment.ProbChebyshev(
        p=float(opts.get("p", 0.9)), eta1=float(opts.get("eta1", 0.93)),
        eta2=float(opts["eta2"]) if "eta2" in opts else None),
}


def _float_list(text):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def parse_snr_range(text) -> tuple:
    """'lo:hi:step' inclusive range, or a comma/space separated list."""
    if ":" in text:
        lo, hi, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise ConfigError("SNR step must be positive")
        count = int(round((hi - lo) / step)) + 1
        grid = tuple(lo + k * step for k in range(count))
        if not grid or grid[-1] > hi + 1e-9:
            raise ConfigError(f"bad SNR range {text!r}")
        return grid
    return _float_list(text)


def load_config(path) -> experiment.ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    try:
        return _build_config(parser)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


def _build_config(parser):
    exp = parser["experiment"]
    scenario = parser["scenario"]
    array = parser["array"]
    mis = parser["mismatch"]

    tx = arrays.ArrayGeometry(array.getint("transmit_elements", 10),
                              array.getfloat("spacing_wavelengths", 0.5))
    rx = arrays.ArrayGeometry(array.getint("receive_elements", 10),
                              array.getfloat("spacing_wavelengths", 0.5))

    kind = mis.get("kind", "ricean").lower()
    if kind == "ricean":
        def spec_for(geom):
            power = mis.getfloat("power", -1.0)
            if power < 0:
                power = mis.getfloat("power_factor", 0.3) * geom.elements
            return mismatch.RiceanMismatch(
                power=power,
                nlos_count=mis.getint("nlos_components", 10),
                angular_halfwidth_deg=mis.getfloat("angular_halfwidth_deg", 2.5),
                geometry=geom)
        tx_mismatch, rx_mismatch = spec_for(tx), spec_for(rx)
    elif kind == "gaussian":
        def spec_for(geom):
            scale = mis.getfloat("covariance_scale", 0.3)
            return mismatch.GaussianMismatch(scale * np.eye(geom.elements))
        tx_mismatch, rx_mismatch = spec_for(tx), spec_for(rx)
    elif kind == "none":
        tx_mismatch = mismatch.GaussianMismatch(np.zeros((tx.elements,) * 2))
        rx_mismatch = mismatch.GaussianMismatch(np.zeros((rx.elements,) * 2))
    else:
        raise ConfigError(f"unknown mismatch kind {kind!r}")

    angles = _float_list(scenario.get("interferer_angles_deg", ""))
    inrs = _float_list(scenario.get("interferer_inr_db", ""))
    if len(angles) != len(inrs):
        raise ConfigError("one INR per interferer angle is required")
    interferers = tuple(simulate.Interferer(a, i)
                        for a, i in zip(angles, inrs))

    scenario_cfg = simulate.ScenarioConfig(
        target_angle_deg=scenario.getfloat("target_angle_deg", 3.0),
        target_snr_db=0.0,  # overridden per grid point
        interferers=interferers,
        tx=tx, rx=rx,
        tx_mismatch=tx_mismatch, rx_mismatch=rx_mismatch,
        noise_power=scenario.getfloat("noise_power", 1.0),
        snapshots=scenario.getint("snapshots", 100),
        signal_in_training=scenario.getboolean("signal_in_training", True))

    methods = []
    for section in parser.sections():
        if not section.startswith("methods."):
            continue
        name = section.split(".", 1)[1]
        if name not in _METHOD_BUILDERS:
            raise ConfigError(f"unknown method {name!r}")
        methods.append(_METHOD_BUILDERS[name](dict(parser[section])))

    return experiment.ExperimentConfig(
        scenario=scenario_cfg,
        methods=tuple(methods),
        snr_grid_db=parse_snr_range(exp.get("snr_db", "-10:20:5")),
        trials=exp.getint("trials", 100),
        seed=exp.getint("seed", 0),
        covariance_draws=exp.getint("covariance_draws", 10000),
        design_covariance=exp.get("design_covariance", "white"),
        average=exp.get("average", "db"),
        jobs=exp.getint("jobs", 1))


def apply_overrides(cfg, args) -> experiment.ExperimentConfig:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.snr is not None:
        updates["snr_grid_db"] = parse_snr_range(args.snr)
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.jobs is not None:
        updates["jobs"] = args.jobs
    if args.db_average:
        updates["average"] = "db"
    if args.methods is not None:
        wanted = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
        by_name = {m.name: m for m in cfg.methods}
        missing = [w for w in wanted if w not in by_name]
        if missing:
            raise ConfigError(f"methods not in config: {', '.join(missing)}")
        updates["methods"] = tuple(by_name[w] for w in wanted)
    if args.signal_free_training:
        updates["scenario"] = dataclasses.replace(cfg.scenario,
                                                  signal_in_training=False)
    return dataclasses.replace(cfg, **updates) if updates else cfg


def run_bound_demo(cfg: experiment.ExperimentConfig, out=sys.stdout) -> None:
    """Certified response-probability lower bound for the receive side of
    the configured scenario, compared against the exact Gaussian value."""
    sc = cfg.scenario
    mid_snr = cfg.snr_grid_db[len(cfg.snr_grid_db) // 2]
    scenario = dataclasses.replace(sc, target_snr_db=mid_snr)
    a_t, a_r, _, inter, C_t, C_r = experiment._statics(
        dataclasses.replace(cfg, scenario=scenario))
    # one representative trial-0 design supplies the receive weight
    rng_t = stream(cfg.seed, 0, "mismatch-tx")
    rng_r = stream(cfg.seed, 0, "mismatch-rx")
    e_t = mismatch.draw(sc.tx_mismatch, sc.target_angle_deg, rng_t)
    e_r = mismatch.draw(sc.rx_mismatch, sc.target_angle_deg, rng_r)
    d_act = linalg.kron(a_t + e_t, a_r + e_r)
    steering = np.vstack([d_act[None, :], inter]) if len(inter) \
        else d_act[None, :]
    snaps = simulate.synthesize_snapshots(scenario, steering,
                                          stream(cfg.seed, 0, "snapshots"))
    R = beamform.regularize_covariance(simulate.sample_covariance(snaps))
    res = beamform.design_probability_constrained(
        R, a_t, a_r, C_t, C_r, 0.93, 0.9 / 0.93, "gaussian")
    v = res.weights.v
    cert = bound.tight_lower_bound(v, a_r, C_r)
    exact = bound.exact_gaussian_probability(v, a_r, C_r)
    print(f"receive weight norm        : {np.linalg.norm(v):.6g}", file=out)
    print(f"certified lower bound      : {cert.bound:.6g}", file=out)
    print(f"raw dual value             : {cert.raw_value:.6g}", file=out)
    print(f"multiplier lambda          : {cert.lam:.6g}", file=out)
    print(f"certificate PSD margins    : {cert.psd_margins[0]:.3e}, "
          f"{cert.psd_margins[1]:.3e}", file=out)
    print(f"solver status / iterations : {cert.status.value} / "
          f"{cert.iterations}", file=out)
    print(f"exact Gaussian probability : {exact:.6g}", file=out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mimobeam",
        description="Monte-Carlo SINR study for joint transmit/receive "
                    "robust MIMO-radar beamforming")
    parser.add_argument("--config", required=True,
                        help="experiment config file (INI-style; see docs)")
    parser.add_argument("--out", default="results.csv",
                        help="output CSV path (manifest at <out>.manifest)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--methods", default=None,
                        help="comma list restricting the methods to run")
    parser.add_argument("--snr", default=None,
                        help="override SNR grid: lo:hi:step or a comma list")
    parser.add_argument("--trials", type=int, default=None,
                        help="override the Monte-Carlo trial count")
    parser.add_argument("--jobs", type=int, default=None,
                        help="parallel trial workers")
    parser.add_argument("--db-average", action="store_true",
                        help="average SINR in dB instead of linear scale")
    parser.add_argument("--signal-free-training",
                        action="store_true",
                        help="exclude the target return from training data")
    parser.add_argument("--bound-demo", action="store_true",
                        help="print a probability-bound certificate for the "
                             "configured scenario instead of sweeping")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args)
        cfg.validate()
    except (ConfigError, MimobeamError) as exc:
        print(f"mimobeam: config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.bound_demo:
            run_bound_demo(cfg)
            return 0
        table = experiment.run_experiment(cfg)
        experiment.emit_csv(table, args.out)
        experiment.write_manifest(f"{args.out}.manifest", cfg, args.out)
    except MimobeamError as exc:
        print(f"mimobeam: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mimobeam: i/o error on {getattr(exc, 'filename', args.out)}: "
              f"{exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
