"""Dense complex linear algebra: Kronecker products, Hermitian square roots,
and the complex-to-real embedding used by the real-arithmetic conic solver.

All routines operate on plain ``numpy`` arrays (complex128) and are pure
functions; problem sizes here are tiny (at most ~100 per side) so everything
is dense double precision.
"""

import numpy as np

from .errors import DimensionMismatchError, NotPSDError

# relative eigenvalue floor below which a "PSD" input is rejected
PSD_TOLERANCE = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors; entry i*dim(b)+j holds a[i]*b[j].

    With this layout ``(u (x) v)^H (a (x) b) == (u^H a)(v^H b)`` exactly, which
    is the factorization the joint transmit/receive weight relies on.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return np.kron(a, b)


def is_hermitian(C: np.ndarray, rtol: float = 1e-12) -> bool:
    C = np.asarray(C)
    scale = np.linalg.norm(C)
    if scale == 0.0:
        return True
    return np.linalg.norm(C - C.conj().T) <= rtol * scale * 10


def hermitianize(C: np.ndarray) -> np.ndarray:
    """Symmetrize away rounding noise: (C + C^H)/2."""
    C = np.asarray(C, dtype=complex)
    return 0.5 * (C + C.conj().T)


def hermitian_sqrt(C: np.ndarray) -> np.ndarray:
    """Positive-semidefinite square root S of a Hermitian PSD matrix.

    S is Hermitian with nonnegative real diagonal and satisfies both
    ``S @ S.conj().T == C`` and ``norm(S @ v)**2 == v^H C v`` for every v.

    Raises
    ------
    NotPSDError
        if the smallest eigenvalue is below ``-PSD_TOLERANCE * trace(C)``,
        which signals an invalid covariance input.
    """
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatchError(f"expected square matrix, got {C.shape}")
    Ch = hermitianize(C)
    vals, vecs = np.linalg.eigh(Ch)
    trace = float(np.trace(Ch).real)
    floor = -PSD_TOLERANCE * max(trace, 0.0)
    if vals[0] < floor:
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {vals[0]:.3e} < {floor:.3e}")
    vals = np.clip(vals, 0.0, None)
    S = (vecs * np.sqrt(vals)) @ vecs.conj().T
    return hermitianize(S)


# ---------------------------------------------------------------------------
# complex-to-real embedding
#
# z in C^n maps to (Re z; Im z) in R^{2n} and M in C^{mxn} to the real block
# matrix [[Re M, -Im M], [Im M, Re M]].  The embedding preserves Euclidean
# norms, maps matrix-vector products to matrix-vector products, Hermitian
# matrices to symmetric ones, and quadratic forms v^H C v to the embedded
# real quadratic form.
# ---------------------------------------------------------------------------

def embed_vector(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    return np.concatenate([z.real, z.imag])


def lift_vector(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_vector`."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size % 2:
        raise DimensionMismatchError("real vector length must be even")
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def embed_matrix(M: np.ndarray) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


def real_part_row(c: np.ndarray) -> np.ndarray:
    """Row r with r @ embed_vector(x) == Re(c^H x)."""
    c = np.asarray(c, dtype=complex).ravel()
    return np.concatenate([c.real, c.imag])


def imag_part_row(c: np.ndarray) -> np.ndarray:
    """Row r with r @ embed_vector(x) == Im(c^H x)."""
    c = np.asarray(c, dtype=complex).ravel()
    return np.concatenate([-c.imag, c.real])
