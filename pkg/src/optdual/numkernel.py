"""Dense linear algebra and seeded randomness.

Everything else in the package sits on these few routines.  Matrices are
plain ``numpy.ndarray`` objects of dtype ``float64`` or ``complex128``;
``adjoint`` is the conjugate transpose, so real inputs go through the same
code paths as complex ones.

Random numbers come from numpy's ``PCG64`` bit generator.  Gaussian
variates use numpy's ziggurat transform, which is part of numpy's
stream-compatibility guarantee for ``Generator``, so a given seed replays
bit-for-bit.
"""

import numpy as np
import scipy.linalg as sla

from .errors import BadShape, NonHermitian, NotPositiveDefinite

__all__ = [
    "adjoint",
    "make_rng",
    "spd_solve",
    "SPDFactor",
    "extreme_eigenvalues",
    "gaussian_matrix",
    "least_squares",
    "is_hermitian",
]

HERMITIAN_RTOL = 1e-12


def adjoint(M):
    """Conjugate transpose."""
    M = np.asarray(M)
    return M.conj().T if np.iscomplexobj(M) else M.T


def make_rng(seed):
    """Return a ``numpy.random.Generator`` backed by PCG64 with 64-bit `seed`."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def is_hermitian(A, rtol=HERMITIAN_RTOL):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(np.abs(A).max(initial=0.0), np.finfo(float).tiny)
    return np.abs(A - adjoint(A)).max(initial=0.0) <= rtol * scale


class SPDFactor:
    """Cholesky factorization of a Hermitian positive definite matrix.

    Factor once, then call :meth:`solve` as often as needed.
    """

    def __init__(self, A):
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise BadShape(f"expected a square matrix, got shape {A.shape}")
        try:
            self._cf = sla.cho_factor(A, lower=True, check_finite=True)
        except sla.LinAlgError as exc:
            raise NotPositiveDefinite(str(exc)) from exc
        diag = np.real(np.diag(self._cf[0]))
        if np.any(diag <= 0):
            raise NotPositiveDefinite("non-positive Cholesky pivot")
        self.n = A.shape[0]

    def solve(self, rhs):
        return sla.cho_solve(self._cf, rhs, check_finite=False)


def spd_solve(A, rhs):
    """Solve ``A x = rhs`` for Hermitian positive definite `A`.

    `rhs` may be a vector or a matrix of right-hand sides.
    """
    return SPDFactor(A).solve(np.asarray(rhs))


def extreme_eigenvalues(A):
    """Return ``(lambda_min, lambda_max)`` of a Hermitian matrix."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise BadShape(f"expected a square matrix, got shape {A.shape}")
    if not is_hermitian(A):
        raise NonHermitian("matrix is not Hermitian to relative 1e-12")
    w = np.linalg.eigvalsh(A)
    return float(w[0]), float(w[-1])


def gaussian_matrix(rows, cols, stddev, rng):
    """i.i.d. real N(0, stddev**2) entries."""
    if rows < 1 or cols < 1:
        raise BadShape(f"rows and cols must be positive, got {rows}x{cols}")
    if stddev <= 0:
        raise ValueError("stddev must be positive")
    return stddev * make_rng(rng).standard_normal((rows, cols))


def least_squares(A, b):
    """Minimum-norm least-squares solution of ``A x = b``."""
    x, *_ = np.linalg.lstsq(np.asarray(A), np.asarray(b), rcond=None)
    return x
