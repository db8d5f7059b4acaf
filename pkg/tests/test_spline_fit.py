import numpy as np
import pytest

from bscc.banded import banded_lu_factor
from bscc.errors import InvalidNodes, ShapeError, TooFewNodes
from bscc.spline_fit import build_rect_matrix, build_square_system, fit_natural_cubic, natural_rhs

from .conftest import random_nodes


class TestRectMatrix:
    def test_four_nodes(self):
        r = build_rect_matrix([0, 1, 2, 3])
        a = r.to_dense()
        assert a.shape == (4, 6)
        np.testing.assert_array_equal(a[0], [1, 0, 0, 0, 0, 0])
        np.testing.assert_array_equal(a[3], [0, 0, 0, 0, 0, 1])

    def test_rows_sum_to_one_and_sparse(self, rng):
        for _ in range(20):
            r = build_rect_matrix(random_nodes(rng, rng.integers(4, 60)))
            a = r.to_dense()
            np.testing.assert_allclose(a.sum(axis=1), 1.0, atol=1e-12)
            assert (np.count_nonzero(a, axis=1) <= 4).all()

    def test_full_row_rank(self):
        a = build_rect_matrix(np.linspace(0, 1, 10)).to_dense()
        assert np.linalg.matrix_rank(a) == 10

    def test_too_few(self):
        with pytest.raises(TooFewNodes):
            build_rect_matrix([0, 1, 2])

    def test_duplicate_nodes(self):
        with pytest.raises(InvalidNodes):
            build_rect_matrix([0, 1, 1, 2, 3])


class TestSquareSystem:
    def test_four_nodes_boundary_row(self):
        a = build_square_system([0, 1, 2, 3]).to_dense()
        row = a[0]
        nz = row[row != 0]
        assert nz.size == 3
        assert np.array_equal(np.sign(nz), [1, -1, 1])
        assert abs(nz.sum()) < 1e-12

    def test_second_row_is_unit(self, rng):
        for _ in range(10):
            a = build_square_system(random_nodes(rng, rng.integers(4, 30))).to_dense()
            expected = np.zeros(a.shape[1])
            expected[0] = 1.0
            np.testing.assert_allclose(a[1], expected, atol=1e-15)
            expected = np.zeros(a.shape[1])
            expected[-1] = 1.0
            np.testing.assert_allclose(a[-2], expected, atol=1e-15)

    def test_chebyshev_50_nonsingular(self):
        x = np.sort(np.cos(np.arange(50) * np.pi / 50))
        a = build_square_system(x).to_dense()
        sign, logdet = np.linalg.slogdet(a)
        assert sign != 0 and np.isfinite(logdet)

    def test_row_sums(self, rng):
        x = random_nodes(rng, 25)
        a = build_square_system(x).to_dense()
        np.testing.assert_allclose(a[1:-1].sum(axis=1), 1.0, atol=1e-12)
        for row in (a[0], a[-1]):
            assert abs(row.sum()) <= 1e-10 * np.abs(row).max()


class TestFit:
    def test_constant(self, rng):
        x = random_nodes(rng, 12)
        s = fit_natural_cubic(x, np.full(12, 3.5))
        np.testing.assert_allclose(s.coeffs, 3.5, rtol=1e-12)

    def test_linear_on_four_nodes(self):
        s = fit_natural_cubic([0, 1, 2, 3], [0, 1, 2, 3])
        assert s(0.5) == pytest.approx(0.5, abs=1e-10)

    def test_linear_reproduction_everywhere(self, rng):
        for _ in range(20):
            x = random_nodes(rng, rng.integers(4, 40), -3, 5)
            a, b = rng.normal(size=2)
            s = fit_natural_cubic(x, a * x + b)
            z = np.linspace(x[0], x[-1], 501)
            g = a * z + b
            assert np.abs(s(z) - g).max() <= 1e-9 * np.abs(g).max()

    def test_sin_chebyshev_100(self):
        x = np.sort(np.cos(np.arange(100) * np.pi / 100))
        s = fit_natural_cubic(x, np.sin(x))
        z = np.linspace(x[0], x[-1], 2001)
        assert np.abs(s(z) - np.sin(z)).max() <= 1e-3

    def test_multichannel_equals_separate(self, rng):
        x = random_nodes(rng, 30)
        samples = rng.normal(size=(30, 4))
        joint = fit_natural_cubic(x, samples)
        for c in range(4):
            alone = fit_natural_cubic(x, samples[:, c])
            np.testing.assert_allclose(joint.coeffs[:, c], alone.coeffs[:, 0], rtol=1e-12, atol=1e-12)

    def test_matrix_channels_keep_shape(self, rng):
        x = random_nodes(rng, 10)
        samples = rng.normal(size=(10, 2, 3))
        s = fit_natural_cubic(x, samples)
        assert s(x[3]).shape == (2, 3)
        np.testing.assert_allclose(s(x), samples, atol=1e-10)

    def test_reuse_factorization(self, rng):
        x = random_nodes(rng, 15)
        lu = banded_lu_factor(build_square_system(x))
        f = rng.normal(size=15)
        np.testing.assert_allclose(fit_natural_cubic(x, f, lu=lu).coeffs, fit_natural_cubic(x, f).coeffs)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            fit_natural_cubic([0, 1, 2, 3], [1, 2, 3])

    def test_rhs_table(self):
        t = natural_rhs(np.array([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_array_equal(t, [[0, 0], [1, 2], [3, 4], [0, 0]])


def test_uniqueness_and_invariants_random_nodes(rng):
    for _ in range(100):
        m = int(rng.integers(4, 129))
        x = random_nodes(rng, m, -2, 2)
        f = rng.normal(size=m)
        s = fit_natural_cubic(x, f)
        scale = np.abs(f).max()
        assert np.abs(s(x) - f).max() <= 1e-8 * scale
        assert np.abs(s.second_derivative(x[[0, -1]])).max() <= 1e-8 * scale
