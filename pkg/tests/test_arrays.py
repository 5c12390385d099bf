import numpy as np
import pytest

from mimobeam import arrays, linalg

G10 = arrays.ArrayGeometry(10)


class TestSteering:
    def test_broadside_all_ones(self):
        for m in (1, 4, 10):
            out = arrays.steering(arrays.ArrayGeometry(m), 0.0).response
            np.testing.assert_allclose(out, np.ones(m))

    def test_two_element_thirty_degrees(self):
        # phase step 2*pi*0.5*sin(30 deg) = pi/2
        out = arrays.steering(arrays.ArrayGeometry(2), 30.0).response
        np.testing.assert_allclose(out, [1.0, 1.0j], atol=1e-12)

    def test_unit_modulus_norm(self):
        out = arrays.steering(G10, 17.3).response
        assert np.linalg.norm(out) ** 2 == pytest.approx(10.0, abs=1e-12)
        assert out[0] == 1.0

    def test_conjugate_symmetry(self):
        for theta in (-72.0, -10.0, 3.0, 45.0):
            plus = arrays.steering(G10, theta).response
            minus = arrays.steering(G10, -theta).response
            np.testing.assert_allclose(minus, plus.conj(), atol=1e-12)

    def test_angle_domain(self):
        with pytest.raises(ValueError):
            arrays.steering(G10, 91.0)


class TestVirtualSteering:
    def test_broadside(self):
        g2 = arrays.ArrayGeometry(2)
        out = arrays.virtual_steering(arrays.steering(g2, 0.0),
                                      arrays.steering(g2, 0.0))
        np.testing.assert_allclose(out, np.ones(4))

    def test_norm(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            th = rng.uniform(-90, 90, 2)
            out = arrays.virtual_steering(arrays.steering(G10, th[0]),
                                          arrays.steering(G10, th[1]))
            assert np.linalg.norm(out) ** 2 == pytest.approx(100.0)

    def test_kronecker_response_factorization(self):
        rng = np.random.default_rng(1)
        a_t = arrays.steering(G10, 3.0).response
        a_r = arrays.steering(G10, 3.0).response
        virt = linalg.kron(a_t, a_r)
        for _ in range(100):
            u = rng.standard_normal(10) + 1j * rng.standard_normal(10)
            v = rng.standard_normal(10) + 1j * rng.standard_normal(10)
            w = linalg.kron(u, v)
            lhs = np.vdot(w, virt)
            rhs = np.vdot(u, a_t) * np.vdot(v, a_r)
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestMismatchNormBound:
    def test_zero(self):
        assert arrays.mismatch_norm_bound(0.0, 0.0, 10, 10) == 0.0

    def test_closed_form(self):
        # sqrt(10) + sqrt(10) + 1
        assert arrays.mismatch_norm_bound(1.0, 1.0, 10, 10) == pytest.approx(
            7.324555320336759, rel=1e-12)

    def test_asymmetric(self):
        out = arrays.mismatch_norm_bound(0.5, 2.0, 4, 9)
        assert out == pytest.approx(np.sqrt(4) * 2.0 + np.sqrt(9) * 0.5 + 1.0)

    def test_dominates_realized_mismatch(self):
        # any draws with per-side norms below the radii stay under the bound
        rng = np.random.default_rng(2)
        m_t = m_r = 5
        a_t = arrays.steering(arrays.ArrayGeometry(m_t), 3.0).response
        a_r = arrays.steering(arrays.ArrayGeometry(m_r), 3.0).response
        eps_t, eps_r = 1.3, 0.7
        bound = arrays.mismatch_norm_bound(eps_t, eps_r, m_t, m_r)
        for _ in range(10000):
            e_t = rng.standard_normal(m_t) + 1j * rng.standard_normal(m_t)
            e_t *= eps_t * rng.random() ** 0.2 / np.linalg.norm(e_t)
            e_r = rng.standard_normal(m_r) + 1j * rng.standard_normal(m_r)
            e_r *= eps_r * rng.random() ** 0.2 / np.linalg.norm(e_r)
            e = (linalg.kron(a_t, e_r) + linalg.kron(e_t, a_r)
                 + linalg.kron(e_t, e_r))
            assert np.linalg.norm(e) <= bound + 1e-12

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            arrays.mismatch_norm_bound(-0.1, 0.0, 4, 4)
