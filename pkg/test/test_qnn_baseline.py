import unittest
from functools import reduce

import numpy as np

import python_evqkan.qnn_baseline as qnn_baseline
import python_evqkan.qsim as qsim
from python_evqkan.evqkan import LayerVector
from python_evqkan.errors import InvalidArgumentError


def single(qubit, matrix):
    return reduce(np.kron, [matrix if q == qubit else np.eye(2) for q in reversed(range(4))])


def cnot(control, target):
    matrix = np.zeros((16, 16))
    for index in range(16):
        partner = index ^ (1 << target) if (index >> control) & 1 else index
        matrix[partner, index] = 1
    return matrix


def dense_qnn(thetas, x):
    """16 x 16 gate-product oracle of the baseline circuit."""
    chain = cnot(2, 3) @ cnot(1, 2) @ cnot(0, 1)
    state = np.zeros(16, dtype=complex)
    state[0] = 1
    for n in range(len(thetas) // 8):
        for k in range(4):
            state = single(k, qsim.ry_matrix(thetas[k + 8 * n])) @ state
        state = chain @ state
        for k in range(4):
            state = single(k, qsim.rx_matrix(np.arccos(2 * x[k % len(x)] - 1))) @ state
            state = single(k, qsim.ry_matrix(thetas[k + 4 + 8 * n])) @ state
        state = chain @ state
    z0z1 = single(0, np.diag([1, -1])) @ single(1, np.diag([1, -1]))
    return np.vdot(state, z0z1 @ state).real


class TestQnnForward(unittest.TestCase):
    """
    Testclass for qnn_forward()

    """

    hamiltonian = qsim.Observable.z_product(4)

    def test_zero_angles_half_inputs(self):
        params = qnn_baseline.QnnParams(np.zeros(8))
        value = qnn_baseline.qnn_forward(params, LayerVector([0.5] * 4), self.hamiltonian)
        self.assertAlmostEqual(value, 0.0, places=12)

    def test_zero_angles_unit_inputs(self):
        params = qnn_baseline.QnnParams(np.zeros(8))
        value = qnn_baseline.qnn_forward(params, LayerVector([1.0] * 4), self.hamiltonian)
        self.assertAlmostEqual(value, 1.0, places=12)

    def test_three_layers_use_all_angles(self):
        params = qnn_baseline.QnnParams(np.zeros(24))
        value = qnn_baseline.qnn_forward(params, LayerVector([1.0] * 4), self.hamiltonian)
        self.assertAlmostEqual(value, 1.0, places=12)

    def test_first_rotation_angle_per_qubit(self):
        """
        Tests that thetas[k] drives the first Ry of qubit k: a half turn on qubit 1 ends
        in |1010> after both CNOT chains, where Z0 Z1 is -1.

        """
        thetas = np.zeros(8)
        thetas[1] = np.pi
        value = qnn_baseline.qnn_forward(qnn_baseline.QnnParams(thetas), LayerVector([1.0] * 4), self.hamiltonian)
        self.assertAlmostEqual(value, -1.0, places=12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            params = qnn_baseline.QnnParams.random(rng, 3)
            x = rng.uniform(size=4)
            value = qnn_baseline.qnn_forward(params, LayerVector(x), self.hamiltonian)
            self.assertLess(abs(value - dense_qnn(params.thetas, x)), 1e-12)
            self.assertLessEqual(abs(value), 1 + 1e-12)

    def test_cyclic_inputs(self):
        rng = np.random.default_rng(1)
        params = qnn_baseline.QnnParams.random(rng, 2)
        x = rng.uniform(size=2)
        value = qnn_baseline.qnn_forward(params, LayerVector(x), self.hamiltonian)
        self.assertLess(abs(value - dense_qnn(params.thetas, x)), 1e-12)

    def test_periodic_in_angles(self):
        rng = np.random.default_rng(2)
        thetas = rng.uniform(0, 2 * np.pi, size=24)
        x = LayerVector(rng.uniform(size=4))
        value = qnn_baseline.qnn_forward(qnn_baseline.QnnParams(thetas), x, self.hamiltonian)
        for index in [0, 7, 23]:
            shifted = thetas.copy()
            shifted[index] += 2 * np.pi
            shifted_value = qnn_baseline.qnn_forward(qnn_baseline.QnnParams(shifted), x, self.hamiltonian)
            self.assertLess(abs(value - shifted_value), 1e-12)

    def test_hamiltonian_dimension(self):
        with self.assertRaises(InvalidArgumentError) as e:
            qnn_baseline.qnn_forward(qnn_baseline.QnnParams(np.zeros(8)), LayerVector([0.5]),
                                     qsim.Observable.z_product(3))
        self.assertEqual(str(e.exception.id), "DimensionMismatch")

    def test_length_mismatch(self):
        with self.assertRaises(InvalidArgumentError) as e:
            qnn_baseline.QnnParams(np.zeros(10))
        self.assertEqual(str(e.exception.id), "LengthMismatch")


class TestQnnModel(unittest.TestCase):

    def test_default_parameter_count(self):
        self.assertEqual(qnn_baseline.QnnModel().num_parameters, 24)

    def test_random_start(self):
        model = qnn_baseline.QnnModel()
        x0 = model.initial_parameters(np.random.default_rng(3))
        self.assertEqual(x0.shape, (24,))
        self.assertTrue(np.all((x0 >= 0) & (x0 < 2 * np.pi)))
        np.testing.assert_array_equal(x0, model.initial_parameters(np.random.default_rng(3)))


if __name__ == '__main__':
    unittest.main()
