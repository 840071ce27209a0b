"""Quantum Neural Network Baseline

Layered data re-uploading circuit on 4 qubits used as the comparison ansatz.
Layer n (thetas indexed as 8n + ...):

    Ry(theta[k + 8n]) on every qubit k
    CNOT chain 0->1, 1->2, 2->3
    Rx(acos(2 x_k - 1)) on every qubit k
    Ry(theta[k + 4 + 8n]) on every qubit k
    CNOT chain 0->1, 1->2, 2->3

starting from |0000>. Inputs with fewer than 4 components are reused
cyclically (x_k = x[k mod dim]).
"""

from dataclasses import dataclass

import numpy as np

from python_evqkan import qsim
from python_evqkan.evqkan import LayerVector
from python_evqkan.errors import InvalidArgumentError

NUM_QUBITS = 4
PARAMS_PER_LAYER = 8
DEFAULT_NUM_LAYERS = 3

CNOT_CHAIN = ((0, 1), (1, 2), (2, 3))


@dataclass(frozen=True)
class QnnParams:
    """Rotation angles theta, length 8 per layer."""

    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=float).reshape(-1)
        if thetas.size == 0 or thetas.size % PARAMS_PER_LAYER:
            raise InvalidArgumentError(f"expected a multiple of {PARAMS_PER_LAYER} angles, got {thetas.size}",
                                       "LengthMismatch")
        thetas.setflags(write=False)
        object.__setattr__(self, 'thetas', thetas)

    @classmethod
    def random(cls, rng, num_layers=DEFAULT_NUM_LAYERS):
        """Uniform angles in [0, 2 pi)."""
        return cls(rng.uniform(0, 2 * np.pi, size=PARAMS_PER_LAYER * num_layers))

    @property
    def num_layers(self):
        return self.thetas.size // PARAMS_PER_LAYER


def _apply_cnot_chain(state):
    for control, target in CNOT_CHAIN:
        state = qsim.apply_cnot(state, control, target)
    return state


def qnn_forward(params, x, hamiltonian):
    """Expectation of hamiltonian after the layered circuit.

    Args:
        params: QnnParams
        x: LayerVector with components in [0, 1]
        hamiltonian: Observable on 4 qubits

    Raises:
        InvalidArgumentError: hamiltonian does not act on 4 qubits
    """

    if hamiltonian.num_qubits != NUM_QUBITS:
        raise InvalidArgumentError(f"hamiltonian should act on {NUM_QUBITS} qubits, got {hamiltonian.num_qubits}",
                                   "DimensionMismatch")

    encoding = np.arccos(np.clip(2 * x.components - 1, -1, 1))
    thetas = params.thetas
    state = qsim.zero_state(NUM_QUBITS)

    for n in range(params.num_layers):
        offset = PARAMS_PER_LAYER * n
        for k in range(NUM_QUBITS):
            state = qsim.apply_ry(state, k, thetas[k + offset])
        state = _apply_cnot_chain(state)
        for k in range(NUM_QUBITS):
            state = qsim.apply_rx(state, k, encoding[k % x.dim])
            state = qsim.apply_ry(state, k, thetas[k + 4 + offset])
        state = _apply_cnot_chain(state)

    return qsim.expectation(state, hamiltonian)


class QnnModel:
    """The baseline circuit, evaluated on flat parameter vectors."""

    def __init__(self, num_layers=DEFAULT_NUM_LAYERS, hamiltonian=None):
        if num_layers < 1:
            raise InvalidArgumentError("need at least one layer", "ModelShape")
        self.num_layers = num_layers
        self.hamiltonian = hamiltonian if hamiltonian is not None else qsim.Observable.z_product(NUM_QUBITS)

    @property
    def num_parameters(self):
        return PARAMS_PER_LAYER * self.num_layers

    def initial_parameters(self, rng):
        return QnnParams.random(rng, self.num_layers).thetas.copy()

    def predict(self, vector, point):
        return qnn_forward(QnnParams(vector), LayerVector(point), self.hamiltonian)
