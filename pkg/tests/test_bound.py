import numpy as np
import pytest

from mimobeam import bound, mismatch
from mimobeam.errors import DimensionMismatchError, MomentMismatchError


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_cov(rng, n, scale=1.0):
    X = rand_complex(rng, n, n)
    return scale * (X @ X.conj().T) / n


def rand_instance(rng, max_dim=4):
    n = int(rng.integers(1, max_dim))
    v = rand_complex(rng, n)
    a = rand_complex(rng, n)
    C = rand_cov(rng, n, rng.random() + 0.05)
    return v, a, C


class TestAssembly:
    def test_scalar_substitution(self):
        A, Ct = bound.assemble_dual_data([1.0 + 0j], [1.0 + 0j],
                                         [[0.0 + 0j]])
        np.testing.assert_allclose(A, [[1.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(Ct, [[0.0, 0.0], [0.0, 1.0]])

    def test_corner_value(self):
        rng = np.random.default_rng(0)
        v = rand_complex(rng, 3)
        a = rand_complex(rng, 3)
        A, _ = bound.assemble_dual_data(v, a, np.eye(3))
        assert A[3, 3].real == pytest.approx(abs(np.vdot(v, a)) ** 2 - 1.0)

    def test_threshold_encoding(self):
        # [e; 1]^H A [e; 1] equals |v^H(a+e)|^2 - 1
        rng = np.random.default_rng(1)
        v = rand_complex(rng, 4)
        a = rand_complex(rng, 4)
        A, _ = bound.assemble_dual_data(v, a, np.eye(4))
        for _ in range(100):
            e = rand_complex(rng, 4)
            et = np.concatenate([e, [1.0]])
            lhs = float(np.real(et.conj() @ A @ et))
            rhs = abs(np.vdot(v, a + e)) ** 2 - 1.0
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            bound.assemble_dual_data(np.ones(3), np.ones(2), np.eye(3))


class TestTightLowerBound:
    def test_degenerate_sure_event(self):
        v = np.array([1.0 + 0j])
        cert = bound.tight_lower_bound(v, np.array([2.0 + 0j]),
                                       1e-8 * np.eye(1))
        assert cert.bound >= 0.99

    def test_degenerate_null_event(self):
        v = np.array([1.0 + 0j])
        cert = bound.tight_lower_bound(v, np.array([0.5 + 0j]),
                                       1e-8 * np.eye(1))
        assert cert.bound <= 0.01

    def test_below_gaussian_probability(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            v, a, C = rand_instance(rng)
            cert = bound.tight_lower_bound(v, a, C)
            exact = bound.exact_gaussian_probability(v, a, C)
            assert cert.bound <= exact + 1e-6
            assert max(cert.psd_margins) <= 1e-7

    def test_bound_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            v, a, C = rand_instance(rng)
            cert = bound.tight_lower_bound(v, a, C)
            assert -1e-9 <= cert.bound <= 1.0 + 1e-9

    def test_monotone_under_shrinking_uncertainty(self):
        rng = np.random.default_rng(4)
        v = rand_complex(rng, 3)
        a = rand_complex(rng, 3)
        a *= 2.0 / abs(np.vdot(v, a))   # responsive case |v^H a| = 2
        C = rand_cov(rng, 3)
        vals = [bound.tight_lower_bound(v, a, t * C).bound
                for t in (1.0, 0.5, 0.25, 0.1, 0.01)]
        assert all(np.diff(vals) >= -1e-7)


class TestExactGaussianProbability:
    def test_degenerate(self):
        assert bound.exact_gaussian_probability(
            [1.0 + 0j], [2.0 + 0j], [[0.0]]) == 1.0
        assert bound.exact_gaussian_probability(
            [1.0 + 0j], [0.5 + 0j], [[0.0]]) == 0.0

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(5)
        v, a, C = rand_instance(rng)
        a *= 1.2 / abs(np.vdot(v, a))
        exact = bound.exact_gaussian_probability(v, a, C)
        E = mismatch.draw_gaussian(C, rng, size=200000)
        emp = float(np.mean(np.abs((a[None, :] + E) @ v.conj()) >= 1.0))
        assert emp == pytest.approx(exact, abs=0.005)


class TestAdversarialCheck:
    def test_all_samplers_respect_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            v, a, C = rand_instance(rng)
            cert = bound.tight_lower_bound(v, a, C)
            report = bound.adversarial_probability_check(
                v, a, C, cert, bound.default_samplers(C), 50000, rng)
            assert report.all_passed

    def test_moment_mismatch_detected(self):
        rng = np.random.default_rng(7)
        v, a, C = rand_instance(rng, max_dim=3)
        cert = bound.tight_lower_bound(v, a, C)

        def biased(rng_, n):
            return mismatch.draw_gaussian(4.0 * C, rng_, size=n)

        with pytest.raises(MomentMismatchError):
            bound.adversarial_probability_check(v, a, C, cert,
                                                [("biased", biased)], 20000,
                                                rng)

    def test_sampler_moments(self):
        rng = np.random.default_rng(8)
        C = rand_cov(rng, 3)
        for name, draw in bound.default_samplers(C):
            E = draw(rng, 50000)
            assert np.linalg.norm(E.mean(axis=0)) < 0.05 * np.sqrt(
                np.trace(C).real)
            C_hat = mismatch.estimate_covariance(E)
            assert np.linalg.norm(C_hat - C) < 0.05 * np.linalg.norm(C), name
