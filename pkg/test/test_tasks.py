import os
import tempfile
import unittest

import numpy as np

import python_evqkan.tasks as tasks
from python_evqkan.errors import InvalidArgumentError


class TestTaskSpec(unittest.TestCase):

    def test_default_normalization(self):
        self.assertEqual(tasks.TaskSpec().normalization, 'analytic_range')
        self.assertEqual(tasks.TaskSpec(target_id='rational').normalization, 'minmax_dataset')
        self.assertEqual(tasks.TaskSpec(kind='classify', target_id='boundary').normalization, 'none')

    def test_dims(self):
        self.assertEqual(tasks.TaskSpec().dim, 4)
        self.assertEqual(tasks.TaskSpec(target_id='radius').dim, 3)
        self.assertEqual(tasks.TaskSpec(kind='classify', target_id='boundary').dim, 2)

    def test_unsupported_target(self):
        """
        Tests if the correct error is raised when the target does not exist for the task kind.

        """
        for kind, target in [('fit', 'boundary'), ('classify', 'eq7'), ('fit', 'nonexistent')]:
            with self.assertRaises(InvalidArgumentError) as e:
                tasks.TaskSpec(kind=kind, target_id=target)
            self.assertEqual(str(e.exception.id), "TargetId")

    def test_boundary_coeffs(self):
        for coeffs in [(0.5,) * 7, (0.5,) * 7 + (1.5,)]:
            with self.assertRaises(InvalidArgumentError) as e:
                tasks.TaskSpec(kind='classify', target_id='boundary', boundary_coeffs=coeffs)
            self.assertEqual(str(e.exception.id), "BoundaryCoeffs")


class TestTargets(unittest.TestCase):
    """
    Testclass for the target functions

    """

    def test_eq7_center(self):
        self.assertEqual(tasks.target_eq7([0.5, 0.5, 0.5, 0.5]), 1.0)

    def test_eq7_corner(self):
        self.assertAlmostEqual(tasks.target_eq7([1, 1, 1, 1]), np.exp(2 * np.sin(2)), places=12)

    def test_eq7_analytic_range(self):
        grid = np.linspace(0, 1, 9)
        values = [tasks.target_eq7([a, b, c, d]) for a in grid for b in grid for c in grid[::2] for d in grid[::2]]
        low, high = tasks.ANALYTIC_RANGES['eq7']
        self.assertGreaterEqual(min(values), low - 1e-12)
        self.assertLessEqual(max(values), high + 1e-12)

    def test_radius(self):
        self.assertAlmostEqual(tasks.target_extra('radius', [1, 1, 1]), np.sqrt(3))
        self.assertEqual(tasks.target_extra('radius', [0.5, 0.5, 0.5]), 0.0)

    def test_guards_keep_values_finite(self):
        self.assertTrue(np.isfinite(tasks.target_extra('exp_frac', [0.5, 1.0, 0.0])))
        self.assertAlmostEqual(tasks.target_extra('log_ratio', [1.0, 0.5]), -np.log(tasks.EPSILON))
        self.assertAlmostEqual(tasks.target_extra('rational', [1.0, 0.0]), 1 / tasks.EPSILON)

    def test_outside_unit_interval(self):
        with self.assertRaises(InvalidArgumentError) as e:
            tasks.target_eq7([0.5, 0.5, 0.5, 1.5])
        self.assertEqual(str(e.exception.id), "OutsideUnitInterval")

    def test_boundary_labels(self):
        d = tasks.PAPER_BOUNDARY_COEFFS['evqkan']
        f0 = tasks.boundary_f(d, 0.0)
        self.assertEqual(tasks.classify_label(d, [0.5, 0.0]), -1 if f0 >= -1 else 1)
        self.assertEqual(tasks.classify_label(d, [0.5, 1.0]), -1 if f0 >= 1 else 1)

    def test_boundary_formula(self):
        d = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
        x0 = -0.4
        expected = (np.exp(0.1 * x0 + 0.2) + 0.3 * np.sqrt(1 - 0.4 * x0 ** 2) + np.cos(0.5 * x0 + 0.6)
                    + np.sin(0.7 * x0 + 0.8))
        self.assertAlmostEqual(tasks.boundary_f(d, x0), expected, places=12)


class TestNormalizeTargets(unittest.TestCase):

    def test_minmax(self):
        np.testing.assert_allclose(tasks.normalize_targets([2, 4, 3], 'minmax_dataset'), [-1, 1, 0])

    def test_constant_minmax(self):
        np.testing.assert_array_equal(tasks.normalize_targets([3, 3, 3], 'minmax_dataset'), [0, 0, 0])

    def test_analytic_eq7(self):
        values = tasks.normalize_targets([1.0, np.exp(2.0)], 'analytic_range', 'eq7')
        np.testing.assert_allclose(values, [-1, 1])

    def test_none(self):
        np.testing.assert_array_equal(tasks.normalize_targets([-1, 1, 1], 'none'), [-1, 1, 1])

    def test_empty(self):
        with self.assertRaises(InvalidArgumentError) as e:
            tasks.normalize_targets([], 'none')
        self.assertEqual(str(e.exception.id), "EmptyTargets")


class TestBuildDataset(unittest.TestCase):
    """
    Testclass for build_dataset()

    """

    def test_shapes_and_weights(self):
        dataset = tasks.build_dataset(tasks.TaskSpec(), 10, 50, rng_seed=0)
        self.assertEqual(dataset.train_points.shape, (10, 4))
        self.assertEqual(dataset.test_points.shape, (50, 4))
        np.testing.assert_allclose(dataset.weights, [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1])
        self.assertTrue(np.all(np.abs(dataset.train_targets) <= 1))

    def test_deterministic(self):
        first = tasks.build_dataset(tasks.TaskSpec(target_id='rational'), rng_seed=3)
        second = tasks.build_dataset(tasks.TaskSpec(target_id='rational'), rng_seed=3)
        np.testing.assert_array_equal(first.train_points, second.train_points)
        np.testing.assert_array_equal(first.test_targets, second.test_targets)

    def test_classification_labels(self):
        task = tasks.TaskSpec(kind='classify', target_id='boundary',
                              boundary_coeffs=tasks.PAPER_BOUNDARY_COEFFS['qnn'])
        dataset = tasks.build_dataset(task, rng_seed=1)
        self.assertEqual(set(np.concatenate([dataset.train_targets, dataset.test_targets])) - {-1.0, 1.0}, set())
        self.assertEqual(dataset.boundary_coeffs, tasks.PAPER_BOUNDARY_COEFFS['qnn'])

    def test_drawn_boundary_coeffs(self):
        dataset = tasks.build_dataset(tasks.TaskSpec(kind='classify', target_id='boundary'), rng_seed=2)
        self.assertEqual(len(dataset.boundary_coeffs), 8)
        self.assertTrue(all(0 <= d <= 1 for d in dataset.boundary_coeffs))

    def test_dataset_size(self):
        with self.assertRaises(InvalidArgumentError) as e:
            tasks.build_dataset(tasks.TaskSpec(), 0, 5)
        self.assertEqual(str(e.exception.id), "DatasetSize")

    def test_csv(self):
        dataset = tasks.build_dataset(tasks.TaskSpec(target_id='radius'), 4, 6, rng_seed=5)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'dataset.csv')
            dataset.to_csv(path)
            loaded = tasks.Dataset.from_csv(path)
        frame = dataset.to_frame()
        self.assertEqual(list(frame.columns), ['x0', 'x1', 'x2', 'target', 'split', 'weight'])
        self.assertTrue(frame[frame['split'] == 'test']['weight'].isna().all())
        np.testing.assert_allclose(loaded.train_points, dataset.train_points)
        np.testing.assert_allclose(loaded.weights, dataset.weights)
        np.testing.assert_allclose(loaded.test_targets, dataset.test_targets)


class TestLoss(unittest.TestCase):

    def test_weighted_distance(self):
        value, per_point = tasks.loss([0, 0], [1, -1], [1, 0.5])
        self.assertEqual(value, 1.5)
        np.testing.assert_array_equal(per_point, [1, 1])

    def test_perfect_prediction(self):
        value, _ = tasks.loss([0.3, -0.2], [0.3, -0.2], [1, 0.5])
        self.assertEqual(value, 0.0)

    def test_length_mismatch(self):
        with self.assertRaises(InvalidArgumentError) as e:
            tasks.loss([0, 0], [1], [1, 1])
        self.assertEqual(str(e.exception.id), "LengthMismatch")

    def test_evaluate_test(self):
        dataset = tasks.build_dataset(tasks.TaskSpec(), 2, 5, rng_seed=0)
        per_point, total = tasks.evaluate_test(lambda point: 0.0, dataset)
        np.testing.assert_allclose(per_point, np.abs(dataset.test_targets))
        self.assertAlmostEqual(total, per_point.sum(), places=9)


if __name__ == '__main__':
    unittest.main()
