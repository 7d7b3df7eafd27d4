import subprocess
import sys

import numpy as np
import pytest

from optdual.errors import NonHermitian, NotPositiveDefinite
from optdual.numkernel import (
    SPDFactor,
    adjoint,
    extreme_eigenvalues,
    gaussian_matrix,
    least_squares,
    make_rng,
    spd_solve,
)

from .conftest import random_spd


def test_spd_solve_identity():
    np.testing.assert_array_equal(spd_solve(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


def test_spd_solve_diagonal():
    np.testing.assert_allclose(spd_solve(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])


def test_spd_solve_seeded_residual():
    rng = make_rng(7)
    A = random_spd(rng, 8)
    b = rng.standard_normal(8)
    x = spd_solve(A, b)
    assert np.linalg.norm(A @ x - b) / np.linalg.norm(b) <= 1e-10


@pytest.mark.parametrize("complex_", [False, True])
def test_spd_solve_residual_fuzz(complex_):
    rng = make_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 65))
        A = random_spd(rng, n, complex_)
        b = rng.standard_normal((n, 2))
        x = spd_solve(A, b)
        assert np.linalg.norm(A @ x - b) / np.linalg.norm(b) <= 1e-10


def test_spd_solve_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        spd_solve(np.diag([1.0, -1.0]), [1.0, 1.0])
    with pytest.raises(NotPositiveDefinite):
        SPDFactor(np.zeros((2, 2)))


@pytest.mark.parametrize(
    "A, expected",
    [
        (np.diag([1.0, 2.0, 5.0]), (1.0, 5.0)),
        (np.eye(4), (1.0, 1.0)),
        # D = [e1, e2, e1] gives D D^* = diag(2, 1)
        (np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]) @ np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).T, (1.0, 2.0)),
    ],
)
def test_extreme_eigenvalues_examples(A, expected):
    np.testing.assert_allclose(extreme_eigenvalues(A), expected, atol=1e-14)


def test_extreme_eigenvalues_bracket_rayleigh_quotients():
    rng = make_rng(3)
    for complex_ in (False, True):
        A = rng.standard_normal((12, 12)) + (1j * rng.standard_normal((12, 12)) if complex_ else 0)
        A = A + adjoint(A)
        lo, hi = extreme_eigenvalues(A)
        for _ in range(100):
            v = rng.standard_normal(12) + (1j * rng.standard_normal(12) if complex_ else 0)
            q = np.real(np.vdot(v, A @ v)) / np.real(np.vdot(v, v))
            assert lo - 1e-10 <= q <= hi + 1e-10


def test_extreme_eigenvalues_rejects_nonhermitian():
    with pytest.raises(NonHermitian):
        extreme_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_adjoint_involution():
    rng = make_rng(5)
    M = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    np.testing.assert_array_equal(adjoint(adjoint(M)), M)


def test_gaussian_matrix_moments():
    G = gaussian_matrix(1000, 1000, 2.0, make_rng(1))
    assert abs(G.mean()) <= 4 * 2.0 / 1000
    assert abs(G.var() / 4.0 - 1) <= 0.02


def test_gaussian_matrix_determinism():
    np.testing.assert_array_equal(gaussian_matrix(5, 7, 1.0, make_rng(42)), gaussian_matrix(5, 7, 1.0, make_rng(42)))


def test_rng_replays_across_processes():
    code = "from optdual.numkernel import make_rng; print(make_rng(123).standard_normal(4).tobytes().hex())"
    outs = {subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
            for _ in range(2)}
    assert len(outs) == 1
    assert outs.pop().strip() == make_rng(123).standard_normal(4).tobytes().hex()


def test_least_squares_min_norm():
    A = np.array([[1.0, 1.0]])
    np.testing.assert_allclose(least_squares(A, [2.0]), [1.0, 1.0])
