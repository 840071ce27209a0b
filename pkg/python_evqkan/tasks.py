"""Benchmark Tasks

Target functions, sampled datasets, target normalization, the weighted
absolute-distance loss and test-set evaluation for the fitting and
classification benchmarks.

Raw inputs x_raw lie in [0, 1]; the target functions see u = 2 x_raw - 1.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas

from python_evqkan.errors import InvalidArgumentError

# Guard for singular targets (log_ratio, exp_frac, rational)
EPSILON = 1e-3

# exp_frac exponents are clipped here to stay inside float64 range
EXP_FRAC_EXPONENT_CAP = 700.0

DEFAULT_N_TRAIN = 10
DEFAULT_N_TEST = 50

# Fitting targets and their input dimension:
#   eq7:        exp(sin(u0^2 + u1^2) + sin(u2^2 + u3^2))
#   exp_frac:   exp((u1 - u2)^2 / (2 u0))
#   log_ratio:  log(|u0 / u1|)
#   rational:   1 / (1 + u0 u1)
#   radius:     sqrt(u0^2 + u1^2 + u2^2)
# Classification:
#   boundary:   label by the boundary curve f(u0) against u1
TARGET_DIMS = {'eq7': 4, 'exp_frac': 3, 'log_ratio': 2, 'rational': 2, 'radius': 3, 'boundary': 2}
FIT_TARGETS = ('eq7', 'exp_frac', 'log_ratio', 'rational', 'radius')

NORMALIZATION_MODES = {'analytic_range', 'minmax_dataset', 'none'}

# Extrema of every fitting target over [-1, 1]^dim, guards included
ANALYTIC_RANGES = {
    'eq7': (1.0, float(np.exp(2.0))),
    'exp_frac': (float(np.exp(-EXP_FRAC_EXPONENT_CAP)), float(np.exp(EXP_FRAC_EXPONENT_CAP))),
    'log_ratio': (float(np.log(EPSILON)), float(-np.log(EPSILON))),
    'rational': (0.5, 1 / EPSILON),
    'radius': (0.0, float(np.sqrt(3.0))),
}

DEFAULT_NORMALIZATION = {
    'eq7': 'analytic_range',
    'radius': 'analytic_range',
    'exp_frac': 'minmax_dataset',
    'log_ratio': 'minmax_dataset',
    'rational': 'minmax_dataset',
    'boundary': 'none',
}

# Published boundary coefficients d_0..d_7, one row per method
PAPER_BOUNDARY_COEFFS = {
    'qnn': (0.05032284, 0.56652581, 0.46472661, 0.06069136, 0.85112123, 0.63853428, 0.46654711, 0.10255578),
    'vqkan': (0.96629125, 0.36456586, 0.84095567, 0.27823314, 0.92940895, 0.96658072, 0.280281, 0.68565531),
    'avqkan': (0.95920638, 0.16102327, 0.85609211, 0.78577276, 0.61996019, 0.76609034, 0.92957889, 0.6526101),
    'evqkan': (0.9378999, 0.89590818, 0.14850074, 0.48032931, 0.9705268, 0.87458637, 0.90574578, 0.72820845),
    'evqkan_transposed': (0.18577828, 0.72439646, 0.11626765, 0.8763747, 0.89123351, 0.57006874, 0.26581059,
                          0.68152472),
}


@dataclass(frozen=True)
class TaskSpec:
    """Benchmark problem description.

    Attributes:
        kind:
            'fit' or 'classify'
        target_id:
            one of TARGET_DIMS; 'boundary' for classification
        boundary_coeffs:
            8 coefficients in [0, 1] (classification only); None draws fresh
            coefficients from the dataset seed
        normalization:
            one of NORMALIZATION_MODES; None picks DEFAULT_NORMALIZATION
    """

    kind: str = 'fit'
    target_id: str = 'eq7'
    boundary_coeffs: tuple = None
    normalization: str = None

    def __post_init__(self):
        if self.kind not in ('fit', 'classify'):
            raise InvalidArgumentError(f"kind can only be 'fit' or 'classify', got {self.kind}", "TaskKind")
        if self.kind == 'fit' and self.target_id not in FIT_TARGETS:
            raise InvalidArgumentError(f"fit targets are {FIT_TARGETS}, got {self.target_id}", "TargetId")
        if self.kind == 'classify' and self.target_id != 'boundary':
            raise InvalidArgumentError(f"classify tasks use the 'boundary' target, got {self.target_id}",
                                       "TargetId")
        if self.boundary_coeffs is not None:
            coeffs = tuple(float(d) for d in self.boundary_coeffs)
            if len(coeffs) != 8 or any(not 0 <= d <= 1 for d in coeffs):
                raise InvalidArgumentError("boundary_coeffs should be 8 values in [0, 1]", "BoundaryCoeffs")
            object.__setattr__(self, 'boundary_coeffs', coeffs)
        normalization = self.normalization or DEFAULT_NORMALIZATION[self.target_id]
        if normalization not in NORMALIZATION_MODES:
            raise InvalidArgumentError(f"normalization can only be {NORMALIZATION_MODES}, got {normalization}",
                                       "NormalizationMode")
        object.__setattr__(self, 'normalization', normalization)

    @property
    def dim(self):
        return TARGET_DIMS[self.target_id]


@dataclass
class Dataset:
    """Sampled training and test points.

    Attributes:
        train_points: N x dim inputs in [0, 1]
        train_targets: N targets
        weights: N loss weights a_m = (N - m) / N
        test_points: M x dim inputs in [0, 1]
        test_targets: M targets
        boundary_coeffs: coefficients used for classification labels, else None
    """

    train_points: np.ndarray
    train_targets: np.ndarray
    weights: np.ndarray
    test_points: np.ndarray
    test_targets: np.ndarray
    boundary_coeffs: tuple = field(default=None)

    @property
    def dim(self):
        return self.train_points.shape[1]

    def to_frame(self):
        """One row per point: x0..x{dim-1}, target, split, weight (empty for test rows)."""
        columns = [f"x{i}" for i in range(self.dim)]
        train = pandas.DataFrame(self.train_points, columns=columns)
        train['target'] = self.train_targets
        train['split'] = 'train'
        train['weight'] = self.weights
        test = pandas.DataFrame(self.test_points, columns=columns)
        test['target'] = self.test_targets
        test['split'] = 'test'
        test['weight'] = np.nan
        return pandas.concat([train, test], ignore_index=True)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path, boundary_coeffs=None):
        frame = pandas.read_csv(path)
        columns = [c for c in frame.columns if c.startswith('x')]
        train = frame[frame['split'] == 'train']
        test = frame[frame['split'] == 'test']
        return cls(train_points=train[columns].to_numpy(dtype=float),
                   train_targets=train['target'].to_numpy(dtype=float),
                   weights=train['weight'].to_numpy(dtype=float),
                   test_points=test[columns].to_numpy(dtype=float),
                   test_targets=test['target'].to_numpy(dtype=float),
                   boundary_coeffs=boundary_coeffs)


def _mapped(x_raw, dim):
    x_raw = np.asarray(x_raw, dtype=float)
    if x_raw.shape[-1] < dim:
        raise InvalidArgumentError(f"expected at least {dim} coordinates, got {x_raw.shape[-1]}", "DimensionMismatch")
    if np.any(x_raw < 0) or np.any(x_raw > 1):
        raise InvalidArgumentError("raw inputs should lie in [0, 1]", "OutsideUnitInterval")
    return 2 * x_raw - 1


def _guard(value):
    """Pushes value away from zero to magnitude EPSILON, keeping its sign (0 counts as positive)."""
    sign = np.where(value < 0, -1.0, 1.0)
    return sign * np.maximum(np.abs(value), EPSILON)


def target_eq7(x_raw):
    u = _mapped(x_raw, 4)
    return float(np.exp(np.sin(u[0] ** 2 + u[1] ** 2) + np.sin(u[2] ** 2 + u[3] ** 2)))


def target_extra(target_id, x_raw):
    """Additional fitting targets with singularity guards."""
    if target_id == 'eq7':
        return target_eq7(x_raw)
    if target_id not in FIT_TARGETS:
        raise InvalidArgumentError(f"fit targets are {FIT_TARGETS}, got {target_id}", "TargetId")

    u = _mapped(x_raw, TARGET_DIMS[target_id])
    if target_id == 'exp_frac':
        exponent = (u[1] - u[2]) ** 2 / (2 * _guard(u[0]))
        return float(np.exp(np.clip(exponent, -EXP_FRAC_EXPONENT_CAP, EXP_FRAC_EXPONENT_CAP)))
    if target_id == 'log_ratio':
        return float(np.log(max(abs(u[0] / _guard(u[1])), EPSILON)))
    if target_id == 'rational':
        return float(1 / _guard(1 + u[0] * u[1]))
    return float(np.sqrt(u[0] ** 2 + u[1] ** 2 + u[2] ** 2))


def boundary_f(d, x0):
    """Boundary curve exp(d0 x0 + d1) + d2 sqrt(1 - d3 x0^2) + cos(d4 x0 + d5) + sin(d6 x0 + d7)."""
    if len(d) != 8:
        raise InvalidArgumentError(f"expected 8 boundary coefficients, got {len(d)}", "BoundaryCoeffs")
    if abs(x0) > 1:
        raise InvalidArgumentError(f"x0 should lie in [-1, 1], got {x0}", "OutsideUnitInterval")
    return float(np.exp(d[0] * x0 + d[1]) + d[2] * np.sqrt(1 - d[3] * x0 ** 2)
                 + np.cos(d[4] * x0 + d[5]) + np.sin(d[6] * x0 + d[7]))


def classify_label(d, x_raw):
    """-1 if the point lies on or below the boundary curve, +1 above it."""
    u = _mapped(x_raw, 2)
    return -1 if boundary_f(d, u[0]) >= u[1] else 1


def evaluate_target(task, x_raw, boundary_coeffs=None):
    """Unnormalized target value of one raw point."""
    if task.kind == 'classify':
        return float(classify_label(boundary_coeffs, x_raw))
    return target_extra(task.target_id, x_raw)


def normalize_targets(values, mode, target_id=None):
    """Maps targets onto [-1, 1].

    Args:
        values: non-empty sequence of raw targets
        mode: 'analytic_range' (needs target_id), 'minmax_dataset' or 'none'
        target_id: fitting target whose analytic extrema are used

    Returns:
        numpy array of normalized values; constant values map to 0 under
        minmax_dataset
    """

    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("cannot normalize an empty set of targets", "EmptyTargets")
    if mode not in NORMALIZATION_MODES:
        raise InvalidArgumentError(f"normalization can only be {NORMALIZATION_MODES}, got {mode}",
                                   "NormalizationMode")

    if mode == 'none':
        return values.copy()
    if mode == 'analytic_range':
        if target_id not in ANALYTIC_RANGES:
            raise InvalidArgumentError(f"no analytic range for target {target_id}", "TargetId")
        low, high = ANALYTIC_RANGES[target_id]
    else:
        low, high = float(values.min()), float(values.max())
        if high == low:
            return np.zeros_like(values)

    return np.clip(2 * (values - low) / (high - low) - 1, -1, 1)


def build_dataset(task, n_train=DEFAULT_N_TRAIN, n_test=DEFAULT_N_TEST, rng_seed=0):
    """Samples a dataset; a pure function of (task, sizes, seed).

    Points are i.i.d. uniform on [0, 1]^dim, training points first. Training
    weights follow generation order. Classification tasks without fixed
    coefficients draw them from the same generator before sampling points.
    """

    if n_train < 1 or n_test < 1:
        raise InvalidArgumentError("need at least one training and one test point", "DatasetSize")

    rng = np.random.default_rng(rng_seed)

    boundary_coeffs = None
    if task.kind == 'classify':
        boundary_coeffs = task.boundary_coeffs
        if boundary_coeffs is None:
            boundary_coeffs = tuple(float(d) for d in rng.uniform(0, 1, size=8))

    train_points = rng.uniform(0, 1, size=(n_train, task.dim))
    test_points = rng.uniform(0, 1, size=(n_test, task.dim))

    raw = np.array([evaluate_target(task, point, boundary_coeffs)
                    for point in np.concatenate([train_points, test_points])])
    targets = normalize_targets(raw, task.normalization, task.target_id)

    weights = (n_train - np.arange(n_train)) / n_train

    return Dataset(train_points=train_points,
                   train_targets=targets[:n_train],
                   weights=weights,
                   test_points=test_points,
                   test_targets=targets[n_train:],
                   boundary_coeffs=boundary_coeffs)


def loss(predictions, targets, weights):
    """Weighted absolute distance L = sum_m a_m |p_m - t_m|.

    Returns:
        (L, per_point) with per_point[m] = |p_m - t_m|
    """
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not predictions.shape == targets.shape == weights.shape:
        raise InvalidArgumentError(f"lengths differ: {predictions.shape}, {targets.shape}, {weights.shape}",
                                   "LengthMismatch")
    per_point = np.abs(predictions - targets)
    return float(weights @ per_point), per_point


def evaluate_test(predict, dataset):
    """Absolute distances on the test split and their unweighted sum."""
    predictions = np.array([predict(point) for point in dataset.test_points])
    per_point = np.abs(predictions - dataset.test_targets)
    return per_point, float(per_point.sum())
