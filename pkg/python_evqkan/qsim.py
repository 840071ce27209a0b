"""Dense Statevector Engine

This module contains a minimal statevector simulator: single-qubit rotations,
multi-controlled gates, Pauli-string expectation values and the application of
(generally non-unitary) dense operators with renormalization.

Conventions:
    Qubit 0 is the least-significant bit of the basis-state index, so the
    amplitude of |q2 q1 q0> lives at index 4*q2 + 2*q1 + q0.
    Ry(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
    Rx(t) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]
    Global phase is ignored when comparing states; use fidelity().

All operations are pure: they return a new StateVector and never modify
their input.
"""

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from python_evqkan.errors import DegenerateStateError, InvalidArgumentError

# Tolerances:
#   UNIT_NORM_TOL:
#       a normalized state has |norm - 1| below this value
#   ORACLE_TOL:
#       two computations of the same quantity agree to within this value
#   IMAG_RESIDUE_TOL:
#       largest imaginary part tolerated in an expectation value
#   ZERO_NORM_TOL:
#       squared norms below this value are treated as zero
UNIT_NORM_TOL = 1e-12
ORACLE_TOL = 1e-10
IMAG_RESIDUE_TOL = 1e-10
ZERO_NORM_TOL = 1e-24

PAULI_LABELS = ('I', 'X', 'Y', 'Z')

PAULI_MATRICES = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class StateVector:
    """The simulated quantum register.

    Attributes:
        num_qubits:
            number of qubits, at least 1
        amplitudes:
            complex vector of length 2**num_qubits
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if self.num_qubits < 1:
            raise InvalidArgumentError(f"num_qubits should be at least 1, got {self.num_qubits}",
                                       "NumQubitsRange")
        if amplitudes.shape != (2 ** self.num_qubits,):
            raise InvalidArgumentError(f"expected {2 ** self.num_qubits} amplitudes, got shape {amplitudes.shape}",
                                       "DimensionMismatch")
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes):
        """Builds a state from a vector whose length is a power of two."""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        num_qubits = int(np.log2(len(amplitudes))) if len(amplitudes) > 0 else 0
        return cls(num_qubits, amplitudes)

    @property
    def dim(self):
        return 2 ** self.num_qubits

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self):
        return abs(self.norm() - 1) < UNIT_NORM_TOL

    def fidelity(self, other):
        """Returns |<self|other>|^2 for two normalized states."""
        if other.num_qubits != self.num_qubits:
            raise InvalidArgumentError("states have different qubit counts", "DimensionMismatch")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; factors[q] acts on qubit q."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) == 0:
            raise InvalidArgumentError("a Pauli string needs at least one factor", "EmptyPauliString")
        for label in factors:
            if label not in PAULI_LABELS:
                raise InvalidArgumentError(f"Pauli labels can only be {PAULI_LABELS}, got {label}",
                                           "PauliLabel")
        object.__setattr__(self, 'factors', factors)

    @classmethod
    def from_sparse(cls, num_qubits, ops):
        """Builds a string from a {qubit: label} mapping, identity elsewhere.

        Example: PauliString.from_sparse(3, {0: 'Z', 1: 'Z'}) is Z0 Z1.
        """
        factors = ['I'] * num_qubits
        for qubit, label in ops.items():
            if not 0 <= qubit < num_qubits:
                raise InvalidArgumentError(f"qubit {qubit} out of range for {num_qubits} qubits", "QubitOutOfRange")
            factors[qubit] = label
        return cls(tuple(factors))

    @property
    def num_qubits(self):
        return len(self.factors)


@dataclass(frozen=True)
class Observable:
    """Real linear combination of Pauli strings, H = sum_j theta_j P_j.

    Attributes:
        terms: tuple of (coefficient, PauliString) pairs
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(coefficient), pauli) for coefficient, pauli in self.terms)
        if len(terms) == 0:
            raise InvalidArgumentError("an observable needs at least one term", "EmptyObservable")
        if not all(np.isfinite(coefficient) for coefficient, _ in terms):
            raise InvalidArgumentError("observable coefficients should be finite", "NonFiniteCoefficient")
        if len({pauli.num_qubits for _, pauli in terms}) != 1:
            raise InvalidArgumentError("all Pauli strings should act on the same number of qubits",
                                       "DimensionMismatch")
        object.__setattr__(self, 'terms', terms)

    @classmethod
    def z_product(cls, num_qubits, qubits=(0, 1)):
        """Single-term observable Z_a Z_b ... on the given qubits."""
        return cls(((1.0, PauliString.from_sparse(num_qubits, {q: 'Z' for q in qubits})),))

    @property
    def num_qubits(self):
        return self.terms[0][1].num_qubits

    def coefficient_bound(self):
        """Sum of |theta_j|; bounds every expectation value of a normalized state."""
        return sum(abs(coefficient) for coefficient, _ in self.terms)


@dataclass(frozen=True)
class DenseOperator:
    """Dense dim x dim operator.

    Attributes:
        matrix:
            complex matrix, dim a power of two
        num_terms:
            number of summed unitaries the operator stands for (T); 1 for
            unitary operators. Success probabilities are reported relative to
            T**2, the post-selection probability of a unitary-sum circuit.
    """

    matrix: np.ndarray
    num_terms: int = 1

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidArgumentError(f"operator should be square, got shape {matrix.shape}", "DimensionMismatch")
        dim = matrix.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise InvalidArgumentError(f"operator dimension should be a power of two, got {dim}",
                                       "DimensionMismatch")
        if self.num_terms < 1:
            raise InvalidArgumentError("num_terms should be at least 1", "NumTermsRange")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def num_qubits(self):
        return int(np.log2(self.dim))

    def transpose(self):
        """Matrix transpose (not the adjoint), keeping the term count."""
        return DenseOperator(self.matrix.T, self.num_terms)

    def is_unitary(self, tol=UNIT_NORM_TOL):
        product = self.matrix.conj().T @ self.matrix
        return bool(np.max(np.abs(product - np.eye(self.dim))) < tol)


def ry_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def zero_state(num_qubits):
    """Returns |0...0> on num_qubits qubits."""
    if not isinstance(num_qubits, (int, np.integer)) or num_qubits < 1:
        raise InvalidArgumentError(f"num_qubits should be an integer >= 1, got {num_qubits}", "NumQubitsRange")
    amplitudes = np.zeros(2 ** num_qubits, dtype=complex)
    amplitudes[0] = 1
    return StateVector(int(num_qubits), amplitudes)


def _check_qubit(state, qubit):
    if not isinstance(qubit, (int, np.integer)) or not 0 <= qubit < state.num_qubits:
        raise InvalidArgumentError(f"qubit should be in [0, {state.num_qubits}), got {qubit}", "QubitOutOfRange")


def _control_mask(num_qubits, controls, pattern):
    """Boolean mask over basis indices whose control bits equal pattern.

    Bit i of pattern is compared with the bit of qubit controls[i].
    """
    indices = np.arange(2 ** num_qubits)
    mask = np.ones(2 ** num_qubits, dtype=bool)
    for i, control in enumerate(controls):
        mask &= ((indices >> control) & 1) == ((pattern >> i) & 1)
    return mask


def apply_controlled_gate(state, controls, pattern, target, matrix):
    """Applies a 2x2 matrix to target on basis states whose control bits equal pattern.

    Args:
        state: StateVector
        controls: ordered sequence of control qubits (may be empty)
        pattern: integer in [0, 2**len(controls)); bit i belongs to controls[i]
        target: target qubit, not among the controls
        matrix: 2x2 complex matrix

    Raises:
        InvalidArgumentError: qubits out of range, overlapping target/controls,
            duplicate controls or pattern out of range
    """

    controls = tuple(controls)
    _check_qubit(state, target)
    for control in controls:
        _check_qubit(state, control)
    if target in controls:
        raise InvalidArgumentError(f"target {target} is also a control", "ControlTargetOverlap")
    if len(set(controls)) != len(controls):
        raise InvalidArgumentError("control qubits should be distinct", "DuplicateControl")
    if not isinstance(pattern, (int, np.integer)) or not 0 <= pattern < 2 ** len(controls):
        raise InvalidArgumentError(f"pattern should be in [0, {2 ** len(controls)}), got {pattern}",
                                   "PatternOutOfRange")

    amplitudes = state.amplitudes.copy()
    indices = np.arange(state.dim)

    # Pair every selected index with target bit 0 to its partner with target bit 1
    mask = _control_mask(state.num_qubits, controls, pattern) & (((indices >> target) & 1) == 0)
    low = indices[mask]
    high = low | (1 << target)

    a0 = state.amplitudes[low]
    a1 = state.amplitudes[high]
    amplitudes[low] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    amplitudes[high] = matrix[1, 0] * a0 + matrix[1, 1] * a1
    return StateVector(state.num_qubits, amplitudes)


def apply_gate(state, qubit, matrix):
    """Applies a 2x2 matrix to one qubit."""
    return apply_controlled_gate(state, (), 0, qubit, matrix)


def apply_ry(state, qubit, theta):
    return apply_gate(state, qubit, ry_matrix(theta))


def apply_rx(state, qubit, theta):
    return apply_gate(state, qubit, rx_matrix(theta))


def apply_x(state, qubit):
    return apply_gate(state, qubit, PAULI_MATRICES['X'])


def apply_h(state, qubit):
    return apply_gate(state, qubit, HADAMARD)


def apply_cnot(state, control, target):
    return apply_controlled_gate(state, (control,), 1, target, PAULI_MATRICES['X'])


def apply_multi_controlled_ry(state, controls, pattern, target, theta):
    """Ry(theta) on target exactly where the control bits equal pattern."""
    return apply_controlled_gate(state, controls, pattern, target, ry_matrix(theta))


def apply_multi_controlled_x(state, controls, pattern, target):
    return apply_controlled_gate(state, controls, pattern, target, PAULI_MATRICES['X'])


def apply_pauli(state, pauli):
    """Applies every factor of a Pauli string (a unitary, no phase bookkeeping needed)."""
    if pauli.num_qubits != state.num_qubits:
        raise InvalidArgumentError(f"Pauli string acts on {pauli.num_qubits} qubits, state has {state.num_qubits}",
                                   "DimensionMismatch")
    for qubit, label in enumerate(pauli.factors):
        if label != 'I':
            state = apply_gate(state, qubit, PAULI_MATRICES[label])
    return state


def expectation(state, obs):
    """Returns sum_j theta_j <psi|P_j|psi>.

    Raises:
        InvalidArgumentError: qubit counts differ, or the value has an
            imaginary part above IMAG_RESIDUE_TOL
    """

    if obs.num_qubits != state.num_qubits:
        raise InvalidArgumentError(f"observable acts on {obs.num_qubits} qubits, state has {state.num_qubits}",
                                   "DimensionMismatch")

    value = 0j
    for coefficient, pauli in obs.terms:
        value += coefficient * np.vdot(state.amplitudes, apply_pauli(state, pauli).amplitudes)

    if abs(value.imag) > IMAG_RESIDUE_TOL:
        raise InvalidArgumentError(f"expectation value has imaginary residue {value.imag}", "ComplexExpectation")
    return float(value.real)


def apply_dense(state, op, renormalize=True):
    """Applies a dense operator, optionally renormalizing the result.

    Args:
        state: StateVector
        op: DenseOperator of matching dimension
        renormalize: divide the result by its norm

    Returns:
        (new_state, success_probability) where success_probability is
        ||A psi||^2 / T^2 and T = op.num_terms.

    Raises:
        InvalidArgumentError: dimension mismatch
        DegenerateStateError: A psi is zero and renormalize is set
    """

    if op.dim != state.dim:
        raise InvalidArgumentError(f"operator dimension {op.dim} does not match state dimension {state.dim}",
                                   "DimensionMismatch")

    amplitudes = op.matrix @ state.amplitudes
    norm_squared = float(np.vdot(amplitudes, amplitudes).real)
    success_probability = norm_squared / op.num_terms ** 2

    if renormalize:
        if norm_squared < ZERO_NORM_TOL:
            raise DegenerateStateError("operator maps the state to the zero vector", "ZeroNormPostSelection")
        amplitudes = amplitudes / np.sqrt(norm_squared)

    return StateVector(state.num_qubits, amplitudes), success_probability


@lru_cache(maxsize=None)
def _pauli_matrix_cached(factors):
    # kron order puts the highest qubit on the left (qubit 0 = least-significant bit)
    return reduce(np.kron, [PAULI_MATRICES[label] for label in reversed(factors)])


def pauli_operator(pauli):
    """Dense matrix of a Pauli string."""
    return DenseOperator(_pauli_matrix_cached(pauli.factors))
