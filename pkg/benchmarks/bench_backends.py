#!/usr/bin/env python3
"""Compare the compiled cone kernels against the pure-NumPy fallback.

Times the full conic solve on the two problem families that dominate the
Monte-Carlo harness: coordinate-descent half-steps (small, two second-order
blocks) and the full-dimensional worst-case design, plus per-kernel
microbenchmarks.  Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from mimobeam import arrays, beamform, linalg, mismatch, simulate
from mimobeam.conic import SolverSettings, solve
from mimobeam.conic import backend
from mimobeam.conic import kernels_py as kp
from mimobeam.conic.problem import NonnegativeCone, SecondOrderCone
from mimobeam.rngstreams import stream


def sample_problems():
    """Subproblems exactly as the default experiment produces them."""
    g = arrays.ArrayGeometry(10)
    a_t = arrays.steering(g, 3.0).response
    a_r = arrays.steering(g, 3.0).response
    spec = mismatch.RiceanMismatch(3.0, 10, 2.5, g)
    C = 0.3 * np.eye(10)
    root = linalg.hermitian_sqrt(C)
    cfg = simulate.ScenarioConfig(
        3.0, 15.0, (simulate.Interferer(30.0, 20.0),
                    simulate.Interferer(50.0, 20.0)),
        g, g, spec, spec, snapshots=100)
    half_steps = []
    worst_cases = []
    for trial in range(6):
        rng = stream(42, trial, "mismatch-tx")
        e_t = mismatch.draw_ricean(spec, 3.0, rng)
        e_r = mismatch.draw_ricean(spec, 3.0, stream(42, trial, "mismatch-rx"))
        steering = [linalg.kron(a_t + e_t, a_r + e_r),
                    arrays.virtual_steering(arrays.steering(g, 30.0),
                                            arrays.steering(g, 30.0)),
                    arrays.virtual_steering(arrays.steering(g, 50.0),
                                            arrays.steering(g, 50.0))]
        snaps = simulate.synthesize_snapshots(cfg, steering,
                                              stream(42, trial, "snapshots"))
        R = beamform.regularize_covariance(simulate.sample_covariance(snaps))
        u = a_t / np.linalg.norm(a_t)
        problem = beamform.build_receive_subproblem(
            R, u, a_r, root, beamform.gamma_gaussian(0.93),
            beamform.gamma_gaussian(0.9 / 0.93), 1.2)
        half_steps.append(problem)
        worst_cases.append(beamform._worst_case_problem(
            R, linalg.kron(a_t, a_r), 9.0))
    return half_steps, worst_cases


def time_solves(problems, backend_name, repeats):
    settings = SolverSettings(tolerance=1e-8, max_iterations=200,
                              backend=backend_name)
    solve(problems[0], settings)  # warm up
    t0 = time.perf_counter()
    objs = []
    for _ in range(repeats):
        for p in problems:
            objs.append(solve(p, settings).objective)
    dt = time.perf_counter() - t0
    return dt / len(objs), np.asarray(objs)


def time_kernels(backend_name, repeats=2000):
    ker = kp if backend_name == "python" else backend._speedups
    layout = kp.build_layout((NonnegativeCone(4), SecondOrderCone(21),
                              SecondOrderCone(21)))
    rng = np.random.default_rng(0)

    def interior():
        x = np.empty(layout.slots)
        x[:4] = rng.random(4) + 0.1
        for off in (4, 25):
            u = rng.standard_normal(21)
            u[0] = np.linalg.norm(u[1:]) + rng.random() + 0.1
            x[off:off + 21] = u
        return x

    x, z = interior(), interior()
    d = rng.standard_normal(layout.slots)
    t0 = time.perf_counter()
    for _ in range(repeats):
        scal = ker.compute_scaling(layout, x, z)
        ker.dense_Hinv(layout, scal)
        ker.apply_W(layout, scal, d)
        ker.apply_WinvT(layout, scal, d)
        ker.jordan_div_lam(layout, scal, d)
        ker.max_step(layout, x, d)
    return (time.perf_counter() - t0) / repeats


def main():
    if not backend.compiled_available():
        print("compiled kernels not built; run `python setup.py build_ext "
              "--inplace` first")
        return
    half_steps, worst_cases = sample_problems()
    print(f"{'case':<28}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for label, problems, repeats in (
            ("BCD half-step SOCP", half_steps, 5),
            ("worst-case design SOCP", worst_cases, 1)):
        t_py, obj_py = time_solves(problems, "python", repeats)
        t_cy, obj_cy = time_solves(problems, "compiled", repeats)
        gap = np.max(np.abs(obj_py - obj_cy)
                     / np.maximum(1.0, np.abs(obj_py)))
        assert gap < 1e-6, f"backends disagree by {gap:.2e}"
        print(f"{label:<28}{t_py * 1e3:>10.2f} ms{t_cy * 1e3:>10.2f} ms"
              f"{t_py / t_cy:>9.2f}x")
    t_py = time_kernels("python")
    t_cy = time_kernels("compiled")
    print(f"{'cone-kernel iteration set':<28}{t_py * 1e6:>10.1f} us"
          f"{t_cy * 1e6:>10.1f} us{t_py / t_cy:>9.2f}x")


if __name__ == "__main__":
    main()
