import unittest

import numpy as np

import python_evqkan.spline as spline
from python_evqkan.errors import InvalidArgumentError


def cox_de_boor(knots, s, order, x):
    """Basis function B_{s,order}(x) by the textbook recursion, right end included."""
    if order == 0:
        if knots[s] <= x < knots[s + 1]:
            return 1.0
        # Close the last non-empty interval at x = 1
        last = len(knots) - 1
        while knots[last - 1] == knots[last]:
            last -= 1
        return 1.0 if x == knots[-1] and s + 1 == last else 0.0
    value = 0.0
    left = knots[s + order] - knots[s]
    if left > 0:
        value += (x - knots[s]) / left * cox_de_boor(knots, s, order - 1, x)
    right = knots[s + order + 1] - knots[s + 1]
    if right > 0:
        value += (knots[s + order + 1] - x) / right * cox_de_boor(knots, s + 1, order - 1, x)
    return value


def oracle_basis(grid, x):
    return np.array([cox_de_boor(grid.knots, s, grid.order, x) for s in range(grid.num_basis)])


class TestSplineGrid(unittest.TestCase):

    def test_default_knots(self):
        grid = spline.SplineGrid()
        self.assertEqual(grid.num_basis, 8)
        self.assertEqual(len(grid.knots), grid.num_basis + grid.order + 1)
        np.testing.assert_array_equal(grid.knots[:4], 0)
        np.testing.assert_array_equal(grid.knots[-4:], 1)
        np.testing.assert_allclose(np.diff(grid.knots[3:-3]), 0.2)

    def test_too_few_basis_functions(self):
        """
        Tests if the correct error is raised when num_basis is below order + 1.

        """
        with self.assertRaises(InvalidArgumentError) as e:
            spline.SplineGrid(num_basis=3, order=3)
        self.assertEqual(str(e.exception.id), "SplineNumBasis")

    def test_negative_order(self):
        with self.assertRaises(InvalidArgumentError) as e:
            spline.SplineGrid(num_basis=3, order=-1)
        self.assertEqual(str(e.exception.id), "SplineOrder")


class TestBasisValues(unittest.TestCase):
    """
    Testclass for basis_values() and basis_matrix()

    """

    grid = spline.SplineGrid()

    def test_clamped_left_end(self):
        np.testing.assert_allclose(spline.basis_values(self.grid, 0.0), [1, 0, 0, 0, 0, 0, 0, 0], atol=1e-15)

    def test_clamped_right_end(self):
        np.testing.assert_allclose(spline.basis_values(self.grid, 1.0), [0, 0, 0, 0, 0, 0, 0, 1], atol=1e-15)

    def test_matches_cox_de_boor(self):
        for x in [0.5, 0.0, 0.13, 0.6, 0.999, 1.0]:
            np.testing.assert_allclose(spline.basis_values(self.grid, x), oracle_basis(self.grid, x), atol=1e-12)

    def test_other_grids(self):
        for grid in [spline.SplineGrid(num_basis=5, order=2), spline.SplineGrid(num_basis=4, order=1)]:
            for x in [0.1, 0.45, 0.8]:
                np.testing.assert_allclose(spline.basis_values(grid, x), oracle_basis(grid, x), atol=1e-12)

    def test_partition_of_unity_and_non_negativity(self):
        xs = np.random.default_rng(0).uniform(0, 1, size=1000)
        values = spline.basis_matrix(self.grid, xs)
        self.assertEqual(values.shape, (1000, 8))
        np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-12)
        self.assertGreaterEqual(values.min(), -1e-15)

    def test_local_support(self):
        """
        Tests that at most order + 1 basis functions are non-zero at any point.

        """
        xs = np.random.default_rng(1).uniform(0, 1, size=1000)
        values = spline.basis_matrix(self.grid, xs)
        self.assertLessEqual(np.max(np.count_nonzero(values > 1e-15, axis=1)), self.grid.order + 1)

    def test_continuity(self):
        xs = np.linspace(0, 1 - 1e-6, 101)
        difference = spline.basis_matrix(self.grid, xs + 1e-6) - spline.basis_matrix(self.grid, xs)
        self.assertLess(np.max(np.abs(difference)), 1e-4)

    def test_outside_unit_interval(self):
        for x in [-0.1, 1.1, np.nan]:
            with self.assertRaises(InvalidArgumentError) as e:
                spline.basis_values(self.grid, x)
            self.assertEqual(str(e.exception.id), "OutsideUnitInterval")


class TestSplineSum(unittest.TestCase):

    grid = spline.SplineGrid()

    def test_zero_coefficients(self):
        self.assertEqual(spline.spline_sum(self.grid, np.zeros(8), 0.4), 0.0)

    def test_constant_coefficients(self):
        for x in [0.0, 0.27, 0.5, 1.0]:
            self.assertAlmostEqual(spline.spline_sum(self.grid, np.full(8, 0.3), x), 0.3, places=12)

    def test_dot_product(self):
        coefficients = np.random.default_rng(2).normal(size=8)
        expected = coefficients @ oracle_basis(self.grid, 0.3)
        self.assertAlmostEqual(spline.spline_sum(self.grid, coefficients, 0.3), expected, places=12)

    def test_length_mismatch(self):
        with self.assertRaises(InvalidArgumentError) as e:
            spline.spline_sum(self.grid, np.zeros(7), 0.5)
        self.assertEqual(str(e.exception.id), "LengthMismatch")


if __name__ == '__main__':
    unittest.main()
