"""Enhanced Variational Quantum Kolmogorov-Arnold Network Ansatz

This module builds the layer operators of the network and runs its forward
pass on the statevector engine in python_evqkan.qsim.

A layer works on N_q qubits and holds a table of R x R angles, R = 2**(N_q-1):

    phi[j][p] = 2 acos(clamp(E_f(x_j) + sum_s c[n][j][p][s] B_s(x_j), -1, 1))

where x_j = x[j mod dim] is the single input element feeding row j. The
block unitary U^{0,p} applies Ry(phi[j][p]) to qubit 0 when qubits 1..N_q-1
hold |j>. The layer operator is the sum of the R block unitaries, the p-th one
shifted by Pauli-X on qubit k for every set bit k-1 of p:

    U^{k, {a..a+2^k-1}} = U^{k-1, {a..}} + X_k U^{k-1, {a+2^(k-1)..}}

Its 2x2 tile at block row r, block column c is Ry(phi[c][r xor c]).

Layers are applied with exact post-selection (apply_dense with
renormalization); lcu_apply_gate_level runs the same layer as an ancilla
circuit and is used to validate the matrix path.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag

from python_evqkan import qsim, spline
from python_evqkan.errors import DegenerateStateError, InvalidArgumentError

# Encoding modes:
#   simple:
#       qubit j gets Ry(acos(2 x[j mod dim] - 1))
#   fit:
#       qubit j gets Ry(acos(2 x[2j mod dim] - 1)), then Rx(acos(2 x[2j+1 mod dim] - 1))
ENCODING_MODES = {'simple', 'fit'}

# Layer chaining:
#   state_passing:
#       the renormalized post-layer state flows into the next layer
#   re_encode:
#       the readout vector is encoded afresh before every following layer
LAYER_CHAINING = {'state_passing', 're_encode'}


@dataclass(frozen=True)
class LayerVector:
    """Input vector of a layer, every component in [0, 1]."""

    components: np.ndarray

    def __post_init__(self):
        components = np.array(self.components, dtype=float).reshape(-1)
        if components.size == 0:
            raise InvalidArgumentError("a layer vector needs at least one component", "EmptyLayerVector")
        if not np.all(np.isfinite(components)) or np.any(components < 0) or np.any(components > 1):
            raise InvalidArgumentError(f"layer vector components should lie in [0, 1], got {components}",
                                       "OutsideUnitInterval")
        components.setflags(write=False)
        object.__setattr__(self, 'components', components)

    @property
    def dim(self):
        return self.components.size


@dataclass(frozen=True)
class AngleTable:
    """Rotation angles phi[j][p] of one layer, shape R x R with R = 2**(N_q-1)."""

    angles: np.ndarray

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float)
        size = angles.shape[0] if angles.ndim == 2 else 0
        if angles.ndim != 2 or angles.shape[1] != size or size < 1 or size & (size - 1):
            raise InvalidArgumentError(f"angle table should be square with a power-of-two side, got {angles.shape}",
                                       "AngleTableShape")
        angles.setflags(write=False)
        object.__setattr__(self, 'angles', angles)

    @property
    def num_rows(self):
        return self.angles.shape[0]

    @property
    def num_qubits(self):
        return int(np.log2(self.num_rows)) + 1


@dataclass(frozen=True)
class EvqkanParams:
    """Trainable spline coefficients c[n][j][p][s].

    Attributes:
        coefficients:
            real tensor of shape (N_l, R, R, N_g), R = 2**(N_q-1)
    """

    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.ndim != 4 or coefficients.shape[1] != coefficients.shape[2]:
            raise InvalidArgumentError(f"coefficients should have shape (N_l, R, R, N_g), got {coefficients.shape}",
                                       "ParamsShape")
        rows = coefficients.shape[1]
        if rows < 1 or rows & (rows - 1) or coefficients.shape[0] < 1 or coefficients.shape[3] < 1:
            raise InvalidArgumentError(f"invalid coefficient shape {coefficients.shape}", "ParamsShape")
        if not np.all(np.isfinite(coefficients)):
            raise InvalidArgumentError("coefficients should be finite", "NonFiniteParams")
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)

    @classmethod
    def zeros(cls, num_layers, num_qubits, grid_size=spline.DEFAULT_NUM_BASIS):
        rows = 2 ** (num_qubits - 1)
        return cls(np.zeros((num_layers, rows, rows, grid_size)))

    @classmethod
    def from_flat(cls, vector, num_layers, num_qubits, grid_size=spline.DEFAULT_NUM_BASIS):
        """Rebuilds the tensor from its row-major (n, j, p, s) flattening."""
        rows = 2 ** (num_qubits - 1)
        vector = np.asarray(vector, dtype=float)
        shape = (num_layers, rows, rows, grid_size)
        if vector.size != int(np.prod(shape)):
            raise InvalidArgumentError(f"expected {int(np.prod(shape))} parameters, got {vector.size}",
                                       "LengthMismatch")
        return cls(vector.reshape(shape))

    @staticmethod
    def count(num_layers, num_qubits, grid_size=spline.DEFAULT_NUM_BASIS):
        rows = 2 ** (num_qubits - 1)
        return num_layers * rows * rows * grid_size

    @property
    def num_layers(self):
        return self.coefficients.shape[0]

    @property
    def num_qubits(self):
        return int(np.log2(self.coefficients.shape[1])) + 1

    @property
    def grid_size(self):
        return self.coefficients.shape[3]

    def flatten(self):
        return self.coefficients.reshape(-1).copy()


def fermi_dirac(x):
    """Returns x / (exp(-x) + 1)."""
    return x / (np.exp(-x) + 1)


def _check_layer(params, layer, grid):
    if not 0 <= layer < params.num_layers:
        raise InvalidArgumentError(f"layer should be in [0, {params.num_layers}), got {layer}", "LayerOutOfRange")
    if grid.num_basis != params.grid_size:
        raise InvalidArgumentError(f"grid has {grid.num_basis} basis functions, parameters have {params.grid_size}",
                                   "LengthMismatch")


def phi_angle(params, layer, row, term, x, grid):
    """Angle phi[row][term] of one layer for the input vector x."""
    _check_layer(params, layer, grid)
    rows = params.coefficients.shape[1]
    if not (0 <= row < rows and 0 <= term < rows):
        raise InvalidArgumentError(f"row and term should be in [0, {rows}), got ({row}, {term})", "IndexOutOfRange")

    x_sel = x.components[row % x.dim]
    argument = fermi_dirac(x_sel) + spline.spline_sum(grid, params.coefficients[layer, row, term], x_sel)
    return float(2 * np.arccos(np.clip(argument, -1, 1)))


def angle_table(params, layer, x, grid):
    """All R x R angles of one layer; equals phi_angle entry by entry."""
    _check_layer(params, layer, grid)
    rows = params.coefficients.shape[1]
    selected = x.components[np.arange(rows) % x.dim]

    # Row j uses the basis values of its own selected element
    basis = spline.basis_matrix(grid, selected)
    spline_terms = np.einsum('jps,js->jp', params.coefficients[layer], basis)
    argument = fermi_dirac(selected)[:, None] + spline_terms
    return AngleTable(2 * np.arccos(np.clip(argument, -1, 1)))


def build_block_unitary(table, term):
    """U^{0,term}: block diagonal, block j = Ry(phi[j][term]) on qubit 0."""
    if not 0 <= term < table.num_rows:
        raise InvalidArgumentError(f"term should be in [0, {table.num_rows}), got {term}", "IndexOutOfRange")
    blocks = [qsim.ry_matrix(table.angles[j, term]) for j in range(table.num_rows)]
    return qsim.DenseOperator(block_diag(*blocks))


@lru_cache(maxsize=None)
def _x_on_qubit(num_qubits, qubit):
    factors = ['I'] * num_qubits
    factors[qubit] = 'X'
    return qsim.pauli_operator(qsim.PauliString(tuple(factors))).matrix


def _sum_operator(table, level, start):
    """U^{level, {start .. start + 2**level - 1}} by the tiling recursion."""
    if level == 0:
        return build_block_unitary(table, start).matrix
    half = 2 ** (level - 1)
    return (_sum_operator(table, level - 1, start)
            + _x_on_qubit(table.num_qubits, level) @ _sum_operator(table, level - 1, start + half))


def build_tiled_operator(table, transposed=False):
    """The layer operator A = sum_p Xshift(p) U^{0,p}, optionally transposed.

    The returned DenseOperator declares num_terms = R, the number of summed
    unitaries.
    """
    matrix = _sum_operator(table, table.num_qubits - 1, 0)
    op = qsim.DenseOperator(matrix, num_terms=table.num_rows)
    return op.transpose() if transposed else op


def lcu_apply_gate_level(state, table):
    """Applies the layer operator as an ancilla circuit with post-selection.

    N_q - 1 ancillae are appended above the working register in |0>, brought
    into uniform superposition, used as controls selecting the p-th shifted
    block unitary, returned with Hadamards and post-selected on all zeros.

    Returns:
        (working_state, success_probability)

    Raises:
        InvalidArgumentError: state and table disagree on N_q
        DegenerateStateError: the all-zero ancilla outcome has zero probability
    """

    num_work = table.num_qubits
    if state.num_qubits != num_work:
        raise InvalidArgumentError(f"table acts on {num_work} qubits, state has {state.num_qubits}",
                                   "DimensionMismatch")
    num_anc = num_work - 1
    ancillae = tuple(range(num_work, num_work + num_anc))
    work_controls = tuple(range(1, num_work))

    amplitudes = np.zeros(2 ** (num_work + num_anc), dtype=complex)
    amplitudes[:state.dim] = state.amplitudes
    full = qsim.StateVector(num_work + num_anc, amplitudes)

    for ancilla in ancillae:
        full = qsim.apply_h(full, ancilla)

    for p in range(table.num_rows):
        # U^{0,p}: one multi-controlled rotation per block row j
        for j in range(table.num_rows):
            pattern = j | (p << len(work_controls))
            full = qsim.apply_multi_controlled_ry(full, work_controls + ancillae, pattern, 0, table.angles[j, p])
        # Xshift(p)
        for k in range(1, num_work):
            if (p >> (k - 1)) & 1:
                full = qsim.apply_multi_controlled_x(full, ancillae, p, k)

    for ancilla in ancillae:
        full = qsim.apply_h(full, ancilla)

    post_selected = full.amplitudes[:state.dim]
    success_probability = float(np.vdot(post_selected, post_selected).real)
    if success_probability < qsim.ZERO_NORM_TOL:
        raise DegenerateStateError("all-zero ancilla outcome has zero probability", "ZeroNormPostSelection")

    return qsim.StateVector(num_work, post_selected / np.sqrt(success_probability)), success_probability


def layer_readout(state, dim):
    """Next layer vector: component c is 0.5 (<P_c> + 1) on qubit c mod N_q,
    with P_c = Z for even c and Y for odd c."""
    if dim < 1:
        raise InvalidArgumentError(f"dim should be at least 1, got {dim}", "DimensionRange")

    components = np.empty(dim)
    for c in range(dim):
        label = 'Z' if c % 2 == 0 else 'Y'
        pauli = qsim.PauliString.from_sparse(state.num_qubits, {c % state.num_qubits: label})
        components[c] = 0.5 * (qsim.expectation(state, qsim.Observable(((1.0, pauli),))) + 1)

    return LayerVector(np.clip(components, 0, 1))


def _encoding_angle(value):
    return float(np.arccos(np.clip(2 * value - 1, -1, 1)))


def encode_initial_state(x, mode, num_qubits):
    """Prepares the input state from |0...0> (see ENCODING_MODES)."""
    if mode not in ENCODING_MODES:
        raise InvalidArgumentError(f"mode can only be {ENCODING_MODES}, got {mode}", "EncodingMode")

    values = x.components
    state = qsim.zero_state(num_qubits)
    for j in range(num_qubits):
        if mode == 'simple':
            state = qsim.apply_ry(state, j, _encoding_angle(values[j % x.dim]))
        else:
            state = qsim.apply_ry(state, j, _encoding_angle(values[(2 * j) % x.dim]))
            state = qsim.apply_rx(state, j, _encoding_angle(values[(2 * j + 1) % x.dim]))
    return state


def forward(params, x_input, task_mode, hamiltonian, grid, transposed=False, chaining='state_passing'):
    """Runs the network on one input.

    Args:
        params: EvqkanParams
        x_input: LayerVector fed to the first layer and the encoder
        task_mode: encoding mode, 'simple' or 'fit'
        hamiltonian: Observable on N_q qubits read out at the end
        grid: SplineGrid matching params.grid_size
        transposed: use the transposed layer operators
        chaining: 'state_passing' or 're_encode'

    Returns:
        (prediction, trace) where trace holds the N_l post-layer vectors.

    Raises:
        DegenerateStateError: a layer maps the state to zero
    """

    if chaining not in LAYER_CHAINING:
        raise InvalidArgumentError(f"chaining can only be {LAYER_CHAINING}, got {chaining}", "LayerChaining")
    if hamiltonian.num_qubits != params.num_qubits:
        raise InvalidArgumentError(f"hamiltonian acts on {hamiltonian.num_qubits} qubits, "
                                   f"network has {params.num_qubits}", "DimensionMismatch")

    state = encode_initial_state(x_input, task_mode, params.num_qubits)
    x = x_input
    trace = []

    for layer in range(params.num_layers):
        if chaining == 're_encode' and layer > 0:
            state = encode_initial_state(x, task_mode, params.num_qubits)
        op = build_tiled_operator(angle_table(params, layer, x, grid), transposed)
        state, _ = qsim.apply_dense(state, op, renormalize=True)
        x = layer_readout(state, x_input.dim)
        trace.append(x)

    return qsim.expectation(state, hamiltonian), trace


class EvqkanModel:
    """A configured network, evaluated on flat parameter vectors.

    Attributes:
        num_layers: N_l
        num_qubits: N_q (working qubits)
        grid: SplineGrid shared by all angles
        task_mode: encoding mode
        hamiltonian: readout observable, Z0 Z1 by default
        transposed: use transposed layer operators
        chaining: layer chaining mode
    """

    def __init__(self, num_layers=3, num_qubits=3, grid=None, task_mode='fit', hamiltonian=None,
                 transposed=False, chaining='state_passing'):
        if num_layers < 1 or num_qubits < 2:
            raise InvalidArgumentError("need at least one layer and two working qubits", "ModelShape")
        if task_mode not in ENCODING_MODES:
            raise InvalidArgumentError(f"mode can only be {ENCODING_MODES}, got {task_mode}", "EncodingMode")
        if chaining not in LAYER_CHAINING:
            raise InvalidArgumentError(f"chaining can only be {LAYER_CHAINING}, got {chaining}", "LayerChaining")
        self.num_layers = num_layers
        self.num_qubits = num_qubits
        self.grid = grid if grid is not None else spline.SplineGrid()
        self.task_mode = task_mode
        self.hamiltonian = hamiltonian if hamiltonian is not None else qsim.Observable.z_product(num_qubits)
        self.transposed = transposed
        self.chaining = chaining

    @property
    def num_parameters(self):
        return EvqkanParams.count(self.num_layers, self.num_qubits, self.grid.num_basis)

    def initial_parameters(self, rng=None):
        """All zeros; rng is accepted for interface parity with QnnModel."""
        return np.zeros(self.num_parameters)

    def params_from_flat(self, vector):
        return EvqkanParams.from_flat(vector, self.num_layers, self.num_qubits, self.grid.num_basis)

    def predict(self, vector, point):
        prediction, _ = forward(self.params_from_flat(vector), LayerVector(point), self.task_mode,
                                self.hamiltonian, self.grid, self.transposed, self.chaining)
        return prediction
