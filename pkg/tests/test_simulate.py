import dataclasses

import numpy as np
import pytest

from mimobeam import arrays, mismatch, simulate
from mimobeam.errors import DimensionMismatchError, ZeroWeightError
from mimobeam.rngstreams import stream

G2 = arrays.ArrayGeometry(2)
NO_MISMATCH = mismatch.GaussianMismatch(np.zeros((2, 2)))


def scenario(**kw):
    base = dict(target_angle_deg=3.0, target_snr_db=0.0, interferers=(),
                tx=G2, rx=G2, tx_mismatch=NO_MISMATCH,
                rx_mismatch=NO_MISMATCH, noise_power=1.0, snapshots=100)
    base.update(kw)
    return simulate.ScenarioConfig(**base)


def target_virtual(cfg):
    return arrays.virtual_steering(
        arrays.steering(cfg.tx, cfg.target_angle_deg),
        arrays.steering(cfg.rx, cfg.target_angle_deg))


class TestSynthesize:
    def test_noise_only_covariance(self):
        cfg = scenario(target_snr_db=-300.0, snapshots=100000)
        Y = simulate.synthesize_snapshots(cfg, [target_virtual(cfg)],
                                          np.random.default_rng(0))
        R = simulate.sample_covariance(Y)
        assert np.linalg.norm(R - np.eye(4)) / np.linalg.norm(np.eye(4)) < 0.02

    def test_single_source_no_noise_rank_one(self):
        # power is defined relative to noise, so a huge SNR over vanishing
        # noise leaves an O(1) signal with negligible noise
        cfg = scenario(target_snr_db=300.0, noise_power=1e-30, snapshots=32)
        d = target_virtual(cfg)
        Y = simulate.synthesize_snapshots(cfg, [d], np.random.default_rng(1))
        # every snapshot is a complex multiple of the steering vector
        coeff = Y[0, :] / d[0]
        np.testing.assert_allclose(Y, np.outer(d, coeff), rtol=1e-6)

    def test_dimension_check(self):
        cfg = scenario()
        with pytest.raises(DimensionMismatchError):
            simulate.synthesize_snapshots(cfg, np.ones((2, 4)),
                                          np.random.default_rng(2))

    def test_seed_reproducible(self):
        cfg = scenario()
        d = target_virtual(cfg)
        a = simulate.synthesize_snapshots(cfg, [d], stream(7, 0, "snaps"))
        b = simulate.synthesize_snapshots(cfg, [d], stream(7, 0, "snaps"))
        assert np.array_equal(a, b)

    def test_signal_free_flag_keeps_other_draws(self):
        cfg_on = scenario(target_snr_db=10.0,
                          interferers=(simulate.Interferer(30.0, 20.0),))
        cfg_off = dataclasses.replace(cfg_on, signal_in_training=False)
        d = target_virtual(cfg_on)
        di = arrays.virtual_steering(arrays.steering(G2, 30.0),
                                     arrays.steering(G2, 30.0))
        y_on = simulate.synthesize_snapshots(cfg_on, [d, di],
                                             stream(3, 0, "snaps"))
        y_off = simulate.synthesize_snapshots(cfg_off, [d, di],
                                              stream(3, 0, "snaps"))
        # toggling the flag changes only the target component: the
        # difference is rank one along d, so noise/interference draws match
        diff = y_on - y_off
        coeff = diff[0, :] / d[0]
        np.testing.assert_allclose(diff, np.outer(d, coeff), rtol=1e-9,
                                   atol=1e-12)

    def test_expected_covariance(self):
        cfg = scenario(target_snr_db=3.0,
                       interferers=(simulate.Interferer(40.0, 6.0),),
                       snapshots=200)
        d = target_virtual(cfg)
        di = arrays.virtual_steering(arrays.steering(G2, 40.0),
                                     arrays.steering(G2, 40.0))
        acc = np.zeros((4, 4), dtype=complex)
        trials = 400
        for t in range(trials):
            Y = simulate.synthesize_snapshots(cfg, [d, di],
                                              stream(11, t, "snaps"))
            acc += simulate.sample_covariance(Y)
        acc /= trials
        p = cfg.source_powers()
        expect = (p[0] * np.outer(d, d.conj())
                  + p[1] * np.outer(di, di.conj()) + np.eye(4))
        assert np.linalg.norm(acc - expect) / np.linalg.norm(expect) < 0.03


class TestSampleCovariance:
    def test_single_snapshot_rank_one(self):
        rng = np.random.default_rng(4)
        y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        R = simulate.sample_covariance(y[:, None])
        eigs = np.linalg.eigvalsh(R)[::-1]
        assert eigs[1] <= 1e-10 * np.trace(R).real

    def test_trace_identity(self):
        rng = np.random.default_rng(5)
        Y = rng.standard_normal((4, 9)) + 1j * rng.standard_normal((4, 9))
        R = simulate.sample_covariance(Y)
        assert np.trace(R).real == pytest.approx(
            np.mean(np.sum(np.abs(Y) ** 2, axis=0)), rel=1e-12)


class TestTrueInCovariance:
    def test_no_interferers(self):
        cfg = scenario(noise_power=2.5)
        R = simulate.true_in_covariance(cfg, [])
        np.testing.assert_allclose(R, 2.5 * np.eye(4))

    def test_rank_one_update_spectrum(self):
        cfg = scenario(interferers=(simulate.Interferer(30.0, 20.0),))
        di = arrays.virtual_steering(arrays.steering(G2, 30.0),
                                     arrays.steering(G2, 30.0))
        R = simulate.true_in_covariance(cfg, [di])
        eigs = np.linalg.eigvalsh(R)
        # INR 20 dB: eigenvalue 100*M_t*M_r + 1 along the steering direction
        assert eigs[-1] == pytest.approx(100.0 * 4 + 1.0, rel=1e-12)
        np.testing.assert_allclose(eigs[:-1], 1.0, rtol=1e-12)

    def test_psd(self):
        cfg = scenario(interferers=(simulate.Interferer(30.0, 20.0),
                                    simulate.Interferer(50.0, 10.0)))
        di = [arrays.virtual_steering(arrays.steering(G2, a),
                                      arrays.steering(G2, a))
              for a in (30.0, 50.0)]
        R = simulate.true_in_covariance(cfg, di)
        assert np.linalg.eigvalsh(R)[0] > 0


class TestOutputSinr:
    def test_matched_filter_gain(self):
        g10 = arrays.ArrayGeometry(10)
        d = arrays.virtual_steering(arrays.steering(g10, 3.0),
                                    arrays.steering(g10, 3.0))
        out = simulate.output_sinr_db(d, d, 1.0, np.eye(100))
        assert out == pytest.approx(20.0, abs=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        d = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        w = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        R = M @ M.conj().T + np.eye(8)
        a = simulate.output_sinr_db(w, d, 2.0, R)
        b = simulate.output_sinr_db(5.0 * w, d, 2.0, R)
        assert a == pytest.approx(b, abs=1e-10)

    def test_never_exceeds_optimal_filter(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = 6
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            R = M @ M.conj().T + 0.5 * np.eye(n)
            best = 10.0 * np.log10(
                np.real(np.vdot(d, np.linalg.solve(R, d))))
            assert simulate.output_sinr_db(w, d, 1.0, R) <= best + 1e-9

    def test_zero_weight_rejected(self):
        with pytest.raises(ZeroWeightError):
            simulate.output_sinr_db(np.zeros(4), np.ones(4), 1.0, np.eye(4))
