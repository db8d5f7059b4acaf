import numpy as np
import pytest

from bscc.banded import BandedMatrix, banded_lu_factor, bandwidth_profile
from bscc.errors import ShapeError, SingularMatrix
from bscc.spline_fit import build_square_system


def random_banded(rng, n, kl, ku):
    a = rng.normal(size=(n, n))
    i, j = np.indices(a.shape)
    a[(j - i > ku) | (i - j > kl)] = 0.0
    # random triangular band matrices are exponentially ill-conditioned;
    # a modest diagonal shift keeps them safely nonsingular
    a += np.diag(np.sign(np.diag(a)) * 2.0)
    return a


def test_storage_layout():
    a = np.array([[1.0, 2, 0], [3, 4, 5], [0, 6, 7]])
    m = BandedMatrix.from_dense(a, 1, 1)
    # row r holds diagonal offset r - lower_bw
    np.testing.assert_array_equal(m.band[0], [0, 3, 6])
    np.testing.assert_array_equal(m.band[1], [1, 4, 7])
    np.testing.assert_array_equal(m.band[2], [2, 5, 0])
    np.testing.assert_array_equal(m.to_dense(), a)
    assert m[1, 0] == 3 and m[0, 2] == 0


def test_from_dense_rejects_out_of_band():
    with pytest.raises(ShapeError):
        BandedMatrix.from_dense(np.ones((3, 3)), 1, 0)


def test_identity_factors():
    lu = banded_lu_factor(BandedMatrix.from_dense(np.eye(10), 2, 2))
    np.testing.assert_array_equal(lu.upper[:, 0], 1.0)
    np.testing.assert_array_equal(lu.upper[:, 1:], 0.0)
    np.testing.assert_array_equal(lu.lower, 0.0)
    np.testing.assert_array_equal(lu.piv, np.arange(10))


@pytest.mark.parametrize("n", [1, 2, 3, 7, 40, 200])
@pytest.mark.parametrize("kl,ku", [(0, 0), (1, 1), (2, 2), (3, 1), (0, 3), (2, 0)])
def test_solve_matches_dense(rng, n, kl, ku):
    a = random_banded(rng, n, kl, ku)
    b = rng.normal(size=(n, 3))
    x = banded_lu_factor(BandedMatrix.from_dense(a, kl, ku)).solve(b)
    ref = np.linalg.solve(a, b)
    np.testing.assert_allclose(x, ref, rtol=1e-9, atol=1e-9 * np.abs(ref).max())
    residual = np.linalg.norm(a @ x - b) / np.linalg.norm(b)
    assert residual <= 1e-9


def test_solve_vector_rhs(rng):
    a = random_banded(rng, 12, 2, 2)
    b = rng.normal(size=12)
    x = banded_lu_factor(BandedMatrix.from_dense(a, 2, 2)).solve(b)
    assert x.shape == (12,)
    np.testing.assert_allclose(a @ x, b, atol=1e-12)


def test_pivoting_needed():
    # zero leading entry forces a row swap
    a = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 2.0, 3.0])
    lu = banded_lu_factor(BandedMatrix.from_dense(a, 1, 1))
    assert lu.piv[0] == 1
    np.testing.assert_allclose(lu.solve(b), np.linalg.solve(a, b))


def test_singular_raises():
    a = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(SingularMatrix):
        banded_lu_factor(BandedMatrix.from_dense(a, 1, 1))


def test_matvec(rng):
    a = random_banded(rng, 9, 2, 1)
    m = BandedMatrix.from_dense(a, 2, 1)
    x = rng.normal(size=(9, 2))
    np.testing.assert_allclose(m.matvec(x), a @ x)


def test_bspline_system_against_dense_oracle():
    m = build_square_system([0.0, 1.0, 2.0, 3.0])
    rhs = np.array([0.0, 1.0, -2.0, 0.5, 3.0, 0.0])
    x = banded_lu_factor(m).solve(rhs)
    assert np.abs(x - np.linalg.solve(m.to_dense(), rhs)).max() <= 1e-10


class TestBandwidthProfile:
    def test_identity(self):
        assert bandwidth_profile(BandedMatrix.from_dense(np.eye(5), 2, 2)) == (1, 0, 0)

    def test_uniform_bspline_system(self):
        per_row, lo, hi = bandwidth_profile(build_square_system(np.linspace(0, 1, 20)))
        assert per_row <= 4 and (lo, hi) == (2, 2)

    def test_chebyshev_bspline_system(self):
        x = np.sort(np.cos(np.arange(64) * np.pi / 64))
        per_row, lo, hi = bandwidth_profile(build_square_system(x))
        assert per_row <= 4 and (lo, hi) == (2, 2)
