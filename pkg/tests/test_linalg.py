import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimobeam import linalg
from mimobeam.errors import NotPSDError


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestKron:
    def test_standard_basis(self):
        out = linalg.kron(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
        assert np.array_equal(out, [1.0, 0.0, 0.0, 0.0])

    def test_direct_arithmetic(self):
        out = linalg.kron(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        assert np.array_equal(out, [3.0, 4.0, 6.0, 8.0])

    def test_entry_layout(self):
        rng = np.random.default_rng(0)
        a = rand_complex(rng, 3)
        b = rand_complex(rng, 4)
        out = linalg.kron(a, b)
        for i in range(3):
            for j in range(4):
                assert out[i * 4 + j] == pytest.approx(a[i] * b[j],
                                                       rel=1e-14)

    def test_norm_multiplicativity(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a = rand_complex(rng, rng.integers(1, 6))
            b = rand_complex(rng, rng.integers(1, 6))
            lhs = np.linalg.norm(linalg.kron(a, b))
            rhs = np.linalg.norm(a) * np.linalg.norm(b)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.complex_numbers(max_magnitude=1e6, allow_nan=False,
                              allow_infinity=False))
    def test_bilinearity(self, alpha):
        rng = np.random.default_rng(2)
        a = rand_complex(rng, 3)
        b = rand_complex(rng, 2)
        lhs = linalg.kron(alpha * a, b)
        rhs = alpha * linalg.kron(a, b)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


class TestHermitianSqrt:
    def test_identity(self):
        np.testing.assert_allclose(linalg.hermitian_sqrt(np.eye(3)),
                                   np.eye(3), atol=1e-14)

    def test_diagonal(self):
        out = linalg.hermitian_sqrt(np.diag([4.0, 9.0]))
        np.testing.assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-14)

    def test_quadratic_form_agreement(self):
        rng = np.random.default_rng(3)
        M = rand_complex(rng, 5, 5)
        C = M.conj().T @ M
        S = linalg.hermitian_sqrt(C)
        for _ in range(100):
            v = rand_complex(rng, 5)
            lhs = np.linalg.norm(S @ v) ** 2
            rhs = float(np.real(np.vdot(v, C @ v)))
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_factor_roundtrip(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            M = rand_complex(rng, 4, 4)
            C = M.conj().T @ M
            S = linalg.hermitian_sqrt(C)
            err = np.linalg.norm(S @ S.conj().T - C)
            assert err <= 1e-10 * np.linalg.norm(C)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSDError):
            linalg.hermitian_sqrt(np.diag([1.0, -1e-3]))

    def test_accepts_rounding_noise(self):
        C = np.diag([1.0, -1e-14])  # above the -1e-10*trace floor
        out = linalg.hermitian_sqrt(C)
        assert np.linalg.eigvalsh(out)[0] >= 0


class TestRealEmbedding:
    def test_scalar(self):
        out = linalg.embed_vector(np.array([3.0 + 4.0j]))
        assert np.array_equal(out, [3.0, 4.0])
        assert np.linalg.norm(out) == pytest.approx(5.0)

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        z = rand_complex(rng, 7)
        np.testing.assert_allclose(linalg.lift_vector(linalg.embed_vector(z)),
                                   z)

    def test_hermitian_maps_to_symmetric(self):
        rng = np.random.default_rng(6)
        M = rand_complex(rng, 4, 4)
        H = M + M.conj().T
        E = linalg.embed_matrix(H)
        np.testing.assert_allclose(E, E.T, atol=1e-12)

    def test_matvec_commutes(self):
        rng = np.random.default_rng(7)
        M = rand_complex(rng, 3, 5)
        z = rand_complex(rng, 5)
        lhs = linalg.embed_matrix(M) @ linalg.embed_vector(z)
        np.testing.assert_allclose(lhs, linalg.embed_vector(M @ z),
                                   rtol=1e-12, atol=1e-12)

    def test_quadratic_form_preserved(self):
        rng = np.random.default_rng(8)
        M = rand_complex(rng, 4, 4)
        C = M @ M.conj().T
        E = linalg.embed_matrix(C)
        for _ in range(100):
            v = rand_complex(rng, 4)
            ve = linalg.embed_vector(v)
            assert ve @ E @ ve == pytest.approx(
                float(np.real(np.vdot(v, C @ v))), rel=1e-10)

    def test_inner_product_isometry(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            a = rand_complex(rng, 6)
            b = rand_complex(rng, 6)
            lhs = linalg.embed_vector(a) @ linalg.embed_vector(b)
            assert lhs == pytest.approx(float(np.real(np.vdot(a, b))),
                                        rel=1e-10, abs=1e-10)

    def test_part_rows(self):
        rng = np.random.default_rng(10)
        c = rand_complex(rng, 5)
        x = rand_complex(rng, 5)
        xe = linalg.embed_vector(x)
        assert linalg.real_part_row(c) @ xe == pytest.approx(
            float(np.real(np.vdot(c, x))), rel=1e-12)
        assert linalg.imag_part_row(c) @ xe == pytest.approx(
            float(np.imag(np.vdot(c, x))), rel=1e-12)
