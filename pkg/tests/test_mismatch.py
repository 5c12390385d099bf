import numpy as np
import pytest

from mimobeam import arrays, mismatch
from mimobeam.errors import DimensionMismatchError, NotPSDError


class TestGaussianDraws:
    def test_zero_covariance(self):
        rng = np.random.default_rng(0)
        out = mismatch.draw_gaussian(np.zeros((4, 4)), rng)
        assert np.all(out == 0)

    def test_identity_covariance_moments(self):
        rng = np.random.default_rng(1)
        K = 100000
        E = mismatch.draw_gaussian(np.eye(4), rng, size=K)
        C_hat = mismatch.estimate_covariance(E)
        rel = np.linalg.norm(C_hat - np.eye(4)) / np.linalg.norm(np.eye(4))
        assert rel < 0.02

    def test_scalar_variance(self):
        rng = np.random.default_rng(2)
        K = 100000
        E = mismatch.draw_gaussian(np.array([[4.0]]), rng, size=K)
        power = np.abs(E) ** 2
        band = 3.0 * power.std() / np.sqrt(K)
        assert abs(power.mean() - 4.0) < band

    def test_structured_covariance(self):
        # covariance-consistency within the loose 5/sqrt(K) Monte-Carlo band
        rng = np.random.default_rng(3)
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        C = M @ M.conj().T
        K = 100000
        E = mismatch.draw_gaussian(C, rng, size=K)
        C_hat = mismatch.estimate_covariance(E)
        assert np.linalg.norm(C_hat - C) / np.linalg.norm(C) <= 5.0 / np.sqrt(K)

    def test_not_psd_propagates(self):
        rng = np.random.default_rng(4)
        with pytest.raises(NotPSDError):
            mismatch.draw_gaussian(np.diag([1.0, -0.5]), rng)


class TestRiceanDraws:
    SPEC = mismatch.RiceanMismatch(power=3.0, nlos_count=10,
                                   angular_halfwidth_deg=2.5,
                                   geometry=arrays.ArrayGeometry(10))

    def test_zero_power(self):
        spec = mismatch.RiceanMismatch(0.0, 10, 2.5, arrays.ArrayGeometry(10))
        out = mismatch.draw_ricean(spec, 3.0, np.random.default_rng(0))
        np.testing.assert_allclose(out, 0.0)

    def test_total_power(self):
        # cross terms vanish under independent phases: E||e||^2 = power
        rng = np.random.default_rng(5)
        K = 100000
        E = mismatch.draw_ricean(self.SPEC, 3.0, rng, size=K)
        p = np.sum(np.abs(E) ** 2, axis=1)
        band = 3.0 * p.std() / np.sqrt(K)
        assert abs(p.mean() - 3.0) < band

    def test_zero_mean(self):
        rng = np.random.default_rng(6)
        E = mismatch.draw_ricean(self.SPEC, 3.0, rng, size=50000)
        assert np.linalg.norm(E.mean(axis=0)) < 0.05

    def test_single_draw_shape(self):
        out = mismatch.draw_ricean(self.SPEC, 3.0, np.random.default_rng(7))
        assert out.shape == (10,)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            mismatch.RiceanMismatch(-1.0, 10, 2.5, arrays.ArrayGeometry(10))
        with pytest.raises(ValueError):
            mismatch.RiceanMismatch(1.0, 0, 2.5, arrays.ArrayGeometry(10))


class TestEstimateCovariance:
    def test_zero_samples(self):
        out = mismatch.estimate_covariance(np.zeros((5, 3), dtype=complex))
        np.testing.assert_allclose(out, np.zeros((3, 3)))

    def test_single_sample_rank_one(self):
        rng = np.random.default_rng(8)
        e = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        out = mismatch.estimate_covariance(e[None, :])
        np.testing.assert_allclose(out, np.outer(e, e.conj()), rtol=1e-12)
        assert np.linalg.matrix_rank(out, tol=1e-9 * np.trace(out).real) == 1

    def test_diagonal_target(self):
        rng = np.random.default_rng(9)
        C = np.diag([1.0, 2.0])
        E = mismatch.draw_gaussian(C, rng, size=100000)
        C_hat = mismatch.estimate_covariance(E)
        assert np.linalg.norm(C_hat - C) / np.linalg.norm(C) < 0.02

    def test_complex_off_diagonal(self):
        # regression: the (i, j) entry must be E[e_i conj(e_j)]
        rng = np.random.default_rng(10)
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        C = M @ M.conj().T
        E = mismatch.draw_gaussian(C, rng, size=200000)
        C_hat = mismatch.estimate_covariance(E)
        assert np.linalg.norm(C_hat - C) / np.linalg.norm(C) < 0.02

    def test_always_psd(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            E = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
            out = mismatch.estimate_covariance(E)
            eigs = np.linalg.eigvalsh(out)
            assert eigs[0] >= -1e-10 * np.trace(out).real

    def test_empty_rejected(self):
        with pytest.raises(DimensionMismatchError):
            mismatch.estimate_covariance(np.zeros((0, 3)))

    def test_dispatcher(self):
        rng = np.random.default_rng(12)
        spec = mismatch.GaussianMismatch(np.eye(3))
        out = mismatch.draw(spec, 45.0, rng, size=8)
        assert out.shape == (8, 3)
        out = mismatch.draw(TestRiceanDraws.SPEC, 3.0, rng)
        assert out.shape == (10,)
