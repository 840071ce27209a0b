"""Experiment Harness

Runs seeded multi-attempt trainings of the EVQKAN network or the QNN
baseline, summarizes them the way the benchmark tables do, sweeps the layer
count and writes result files.

A run directory holds:
    attempts/attempt_XX.json    one RunRecord per attempt, written as soon as
                                the attempt finishes
    loss_trajectory.csv         attempt, evaluation_index, loss
    test_distances.csv          attempt, point_index, distance
    summary.json                config echo, statistics, per-attempt totals,
                                seeds, library version
    plotdata/loss_vs_trial.csv
    plotdata/distance_by_point.csv

Apart from elapsed_seconds, every file is a function of the configuration
alone, whether attempts run sequentially or in worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
import datetime
import json
import logging
import os
import warnings

import numpy as np
import pandas

from python_evqkan import optimizer, tasks, timing
from python_evqkan import version_info
from python_evqkan.errors import DegenerateStateError, EmptyInputError, HarnessError
from python_evqkan.evqkan import LAYER_CHAINING, EvqkanModel
from python_evqkan.qnn_baseline import QnnModel
from python_evqkan.spline import SplineGrid

logger = logging.getLogger(__name__)

# Current library version
LIB_VERSION = version_info.version

METHODS = {'evqkan', 'qnn'}

ATTEMPTS_DIR = 'attempts'
PLOTDATA_DIR = 'plotdata'

# Smallest distance shown on the log10 axis of the per-point plot data
LOG10_FLOOR = 1e-16


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a run.

    Attributes:
        method: 'evqkan' or 'qnn'
        task: TaskSpec
        num_layers: N_l
        num_qubits: N_q working qubits (EVQKAN only, QNN always uses 4)
        grid_size: N_g basis functions per angle
        attempts: number of independent attempts
        master_seed: attempt i uses seed master_seed + i
        transposed: use transposed EVQKAN layer operators
        layer_chaining: 'state_passing' or 're_encode'
        optimizer: OptimizerConfig
        output_dir: directory receiving the result files, None to skip writing
        n_train: training points per attempt (N)
        n_test: test points per attempt
        workers: worker processes for attempts, 1 runs them in this process
        paper_mode: the published boundary coefficients were applied
    """

    method: str = 'evqkan'
    task: tasks.TaskSpec = field(default_factory=tasks.TaskSpec)
    num_layers: int = 3
    num_qubits: int = 3
    grid_size: int = 8
    attempts: int = 10
    master_seed: int = 0
    transposed: bool = False
    layer_chaining: str = 'state_passing'
    optimizer: optimizer.OptimizerConfig = field(default_factory=optimizer.OptimizerConfig)
    output_dir: str = None
    n_train: int = tasks.DEFAULT_N_TRAIN
    n_test: int = tasks.DEFAULT_N_TEST
    workers: int = 1
    paper_mode: bool = False

    def __post_init__(self):

        if self.method not in METHODS:
            err_msg = f"method can only be {METHODS}, got: {self.method}"
            raise HarnessError(err_msg, "UnsupportedMethod")

        if self.layer_chaining not in LAYER_CHAINING:
            err_msg = f"layer_chaining can only be {LAYER_CHAINING}, got: {self.layer_chaining}"
            raise HarnessError(err_msg, "LayerChaining")

        for name in ('num_layers', 'num_qubits', 'grid_size', 'attempts', 'n_train', 'n_test', 'workers'):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                raise HarnessError(f"{name} should be a positive integer, got {value}", "PositiveInteger")

        if self.num_qubits < 2:
            raise HarnessError("EVQKAN needs at least 2 working qubits", "NumQubitsRange")

        if not isinstance(self.transposed, bool):
            raise HarnessError(f"transposed should be bool, got {type(self.transposed)}", "TransposedBoolean")

        if self.transposed and self.method == 'qnn':
            raise HarnessError("the transposed ansatz only exists for EVQKAN", "TransposedQnn")

    def attempt_seed(self, attempt):
        return self.master_seed + attempt

    def to_dict(self, include_output_dir=True):
        """JSON-ready mapping mirroring the dataclass fields."""
        data = asdict(self)
        data['task']['boundary_coeffs'] = (list(self.task.boundary_coeffs)
                                           if self.task.boundary_coeffs is not None else None)
        if not include_output_dir:
            data.pop('output_dir')
        return data

    @classmethod
    def from_dict(cls, data):
        """Inverse of to_dict; unknown keys are rejected."""
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise HarnessError(f"unknown configuration keys: {sorted(unknown)}", "UnknownConfigKey")
        if 'task' in data and isinstance(data['task'], dict):
            data['task'] = tasks.TaskSpec(**data['task'])
        if 'optimizer' in data and isinstance(data['optimizer'], dict):
            data['optimizer'] = optimizer.OptimizerConfig(**data['optimizer'])
        return cls(**data)


def load_config(path):
    """Reads an ExperimentConfig from a JSON file.

    Accepts a plain configuration file or a summary.json written by
    emit_reports (its 'config' entry is used).
    """

    try:
        with open(path, encoding='utf-8') as file_in:
            data = json.load(file_in)
    except (OSError, ValueError) as e:
        raise HarnessError(f"could not read configuration {path}: {e}", "ConfigRead")

    if 'config' in data and isinstance(data['config'], dict):
        data = data['config']
    return ExperimentConfig.from_dict(data)


def apply_paper_mode(config):
    """Published defaults: N_q = 3, N_g = 8, 10 attempts, budget 1000, and for
    classification the published boundary coefficients of the method.

    num_layers is kept as given, so single layer runs stay single layer. The
    attempt count and budget are overwritten; the command line reapplies
    --budget afterwards but not --attempts.
    """

    task = config.task
    if task.kind == 'classify':
        if config.method == 'qnn':
            row = 'qnn'
        elif config.transposed:
            row = 'evqkan_transposed'
        else:
            row = 'evqkan'
        task = replace(task, boundary_coeffs=tasks.PAPER_BOUNDARY_COEFFS[row])

    return replace(config, task=task, num_qubits=3, grid_size=8, attempts=10,
                   optimizer=replace(config.optimizer, max_evaluations=1000), paper_mode=True)


def build_model(config):
    """EvqkanModel or QnnModel for the configuration."""
    if config.method == 'qnn':
        return QnnModel(num_layers=config.num_layers)
    task_mode = 'fit' if config.task.kind == 'fit' else 'simple'
    return EvqkanModel(num_layers=config.num_layers, num_qubits=config.num_qubits,
                       grid=SplineGrid(num_basis=config.grid_size), task_mode=task_mode,
                       transposed=config.transposed, chaining=config.layer_chaining)


@dataclass
class RunRecord:
    """Outcome of one attempt.

    Attributes:
        attempt: attempt index
        seed: seed of the attempt
        trajectory: optimizer Trajectory
        final_params: best parameters found
        test_distances: |prediction - target| per test point
        test_total: sum of test_distances
        test_predictions: raw network output per test point
        elapsed_seconds: wall time of the attempt
        status: 'ok' or 'failed'
        error: error message of a failed attempt
        correct_count: classification only, test points whose prediction
            sign matches the label (a prediction of 0 counts as +1)
    """

    attempt: int
    seed: int
    trajectory: optimizer.Trajectory
    final_params: np.ndarray
    test_distances: np.ndarray
    test_total: float
    test_predictions: np.ndarray
    elapsed_seconds: float = 0.0
    status: str = 'ok'
    error: str = ''
    correct_count: int = None

    @property
    def succeeded(self):
        return self.status == 'ok'

    def to_dict(self):
        trajectory = self.trajectory
        return {
            'attempt': self.attempt,
            'seed': self.seed,
            'status': self.status,
            'error': self.error,
            'test_total': self.test_total,
            'correct_count': self.correct_count,
            'test_distances': [float(v) for v in self.test_distances],
            'test_predictions': [float(v) for v in self.test_predictions],
            'final_params': [float(v) for v in self.final_params],
            'trajectory': {
                'evaluations': [[int(i), float(v)] for i, v in trajectory.evaluations],
                'best_loss': trajectory.best_loss,
                'num_evaluations': trajectory.num_evaluations,
                'status': trajectory.status,
                'message': trajectory.message,
            },
            'elapsed_seconds': self.elapsed_seconds,
        }

    @classmethod
    def from_dict(cls, data):
        trajectory_data = data['trajectory']
        final_params = np.asarray(data['final_params'], dtype=float)
        trajectory = optimizer.Trajectory(evaluations=[(int(i), float(v)) for i, v in trajectory_data['evaluations']],
                                          best_params=final_params,
                                          best_loss=float(trajectory_data['best_loss']),
                                          num_evaluations=int(trajectory_data['num_evaluations']),
                                          status=trajectory_data['status'],
                                          message=trajectory_data['message'])
        return cls(attempt=int(data['attempt']),
                   seed=int(data['seed']),
                   trajectory=trajectory,
                   final_params=final_params,
                   test_distances=np.asarray(data['test_distances'], dtype=float),
                   test_total=float(data['test_total']),
                   test_predictions=np.asarray(data['test_predictions'], dtype=float),
                   elapsed_seconds=float(data['elapsed_seconds']),
                   status=data['status'],
                   error=data['error'],
                   correct_count=data.get('correct_count'))


@dataclass(frozen=True)
class SummaryStats:
    """Order statistics of test_total over the successful attempts."""

    average: float
    median: float
    minimum: float
    maximum: float
    num_attempts: int
    num_failed: int = 0
    mean_correct: float = None


def run_attempt(config, attempt, time_function_ms=timing.millis):
    """Trains and evaluates one attempt.

    The attempt seed feeds two independent streams: one samples the dataset,
    the other initializes QNN angles (EVQKAN starts from zeros).

    Returns:
        RunRecord; a degenerate state during training or evaluation marks
        the record as failed instead of raising.
    """

    start_ms = time_function_ms()
    seed = config.attempt_seed(attempt)
    data_seed, init_seed = np.random.SeedSequence(seed).spawn(2)

    dataset = tasks.build_dataset(config.task, config.n_train, config.n_test,
                                  rng_seed=data_seed)
    model = build_model(config)
    x0 = model.initial_parameters(np.random.default_rng(init_seed))

    def objective(vector):
        predictions = [model.predict(vector, point) for point in dataset.train_points]
        value, _ = tasks.loss(predictions, dataset.train_targets, dataset.weights)
        return value

    trajectory = optimizer.Trajectory()
    try:
        trajectory = optimizer.minimize(objective, x0, config.optimizer)
        final_params = trajectory.best_params

        predictions = []

        def recording_predict(point):
            value = model.predict(final_params, point)
            predictions.append(value)
            return value

        distances, total = tasks.evaluate_test(recording_predict, dataset)

    except DegenerateStateError as e:
        warnings.warn(f"Attempt {attempt} (seed {seed}) failed: {e.message}")
        return RunRecord(attempt=attempt, seed=seed, trajectory=trajectory, final_params=np.asarray(x0),
                         test_distances=np.array([]), test_total=float('nan'), test_predictions=np.array([]),
                         elapsed_seconds=timing.elapsed_seconds(start_ms, time_function_ms),
                         status='failed', error=f"{e.id}: {e.message}")

    correct_count = None
    if config.task.kind == 'classify':
        predicted_sign = np.where(np.asarray(predictions) >= 0, 1, -1)
        correct_count = int(np.sum(predicted_sign == dataset.test_targets))

    if trajectory.status == 'non_finite':
        status, error = 'failed', f"NonFiniteObjective: {trajectory.message}"
        warnings.warn(f"Attempt {attempt} (seed {seed}) failed: {trajectory.message}")
    else:
        status, error = 'ok', ''

    record = RunRecord(attempt=attempt, seed=seed, trajectory=trajectory, final_params=np.asarray(final_params),
                       test_distances=distances, test_total=total, test_predictions=np.asarray(predictions),
                       elapsed_seconds=timing.elapsed_seconds(start_ms, time_function_ms),
                       status=status, error=error, correct_count=correct_count)

    logger.info("Attempt %d (seed %d): best loss %.6g after %d evaluations, test total %.6g, %.1f s",
                attempt, seed, trajectory.best_loss, trajectory.num_evaluations, total, record.elapsed_seconds)
    return record


def _write_json(path, data):
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as file_out:
            json.dump(data, file_out, indent=2, ensure_ascii=False)
            file_out.write('\n')
    except OSError as e:
        raise HarnessError(f"could not write {path}: {e}", "WriteFailed")


def save_attempt_record(record, output_dir):
    attempts_dir = os.path.join(output_dir, ATTEMPTS_DIR)
    os.makedirs(attempts_dir, exist_ok=True)
    _write_json(os.path.join(attempts_dir, f"attempt_{record.attempt:02d}.json"), record.to_dict())


def load_attempt_records(output_dir):
    """Reads every attempts/attempt_XX.json of a run directory, in attempt order."""
    attempts_dir = os.path.join(output_dir, ATTEMPTS_DIR)
    if not os.path.isdir(attempts_dir):
        raise HarnessError(f"no {ATTEMPTS_DIR} directory in {output_dir}", "NoAttempts")
    records = []
    for name in sorted(os.listdir(attempts_dir)):
        if name.startswith('attempt_') and name.endswith('.json'):
            with open(os.path.join(attempts_dir, name), encoding='utf-8') as file_in:
                records.append(RunRecord.from_dict(json.load(file_in)))
    return sorted(records, key=lambda record: record.attempt)


def run_experiment(config, time_function_ms=timing.millis):
    """Runs config.attempts independent attempts.

    With config.workers > 1 attempts run in worker processes; the records
    are identical to a sequential run. Each finished attempt is written to
    the run directory immediately (when output_dir is set), so an aborted
    run keeps its completed attempts.

    Returns:
        list of RunRecord in attempt order

    Raises:
        HarnessError: a result file could not be written
    """

    if not callable(time_function_ms):
        raise HarnessError("time_function_ms should be a function", "TimeFunctionMsCallable")

    if config.output_dir is not None:
        os.makedirs(config.output_dir, exist_ok=True)

    logger.info("Running %d %s attempts on %s/%s (N_l=%d, transposed=%s)", config.attempts, config.method,
                config.task.kind, config.task.target_id, config.num_layers, config.transposed)

    records = []

    def collect(record):
        if config.output_dir is not None:
            save_attempt_record(record, config.output_dir)
        records.append(record)

    if config.workers == 1:
        for attempt in range(config.attempts):
            collect(run_attempt(config, attempt, time_function_ms))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            futures = [executor.submit(run_attempt, config, attempt, time_function_ms)
                       for attempt in range(config.attempts)]
            for future in as_completed(futures):
                collect(future.result())

    return sorted(records, key=lambda record: record.attempt)


def summarize(records, is_classification=False):
    """Average, median, minimum and maximum of test_total over successful records.

    Failed records are counted in num_failed and left out of the statistics.

    Raises:
        EmptyInputError: no successful record
    """

    succeeded = [record for record in records if record.succeeded]
    if not succeeded:
        raise EmptyInputError("no successful attempts to summarize", "NoSuccessfulRecords")

    totals = np.array([record.test_total for record in succeeded])
    mean_correct = (float(np.mean([record.correct_count for record in succeeded]))
                    if is_classification else None)

    return SummaryStats(average=float(np.mean(totals)),
                        median=float(np.median(totals)),
                        minimum=float(np.min(totals)),
                        maximum=float(np.max(totals)),
                        num_attempts=len(records),
                        num_failed=len(records) - len(succeeded),
                        mean_correct=mean_correct)


def layer_sweep(base, layer_range, time_function_ms=timing.millis):
    """Runs run_experiment for every layer count.

    Each layer count writes into <output_dir>/layers_<n>; the sweep table is
    written to <output_dir>/sweep.csv.

    Returns:
        pandas DataFrame with columns layers, average, median, minimum,
        maximum, mean_elapsed
    """

    layer_range = list(layer_range)
    if not layer_range:
        raise HarnessError("layer_range should not be empty", "EmptyLayerRange")

    rows = []
    for num_layers in layer_range:
        output_dir = (os.path.join(base.output_dir, f"layers_{num_layers}")
                      if base.output_dir is not None else None)
        config = replace(base, num_layers=num_layers, output_dir=output_dir)
        records = run_experiment(config, time_function_ms)
        stats = summarize(records, config.task.kind == 'classify')
        if output_dir is not None:
            emit_reports(records, stats, config, output_dir)
        mean_elapsed = float(np.mean([record.elapsed_seconds for record in records]))
        rows.append({'layers': num_layers, 'average': stats.average, 'median': stats.median,
                     'minimum': stats.minimum, 'maximum': stats.maximum, 'mean_elapsed': mean_elapsed})
        logger.info("Sweep N_l=%d: average %.6g, mean elapsed %.1f s", num_layers, stats.average, mean_elapsed)

    sweep_df = pandas.DataFrame(rows, columns=['layers', 'average', 'median', 'minimum', 'maximum',
                                               'mean_elapsed'])
    if base.output_dir is not None:
        os.makedirs(base.output_dir, exist_ok=True)
        _write_csv(sweep_df, os.path.join(base.output_dir, 'sweep.csv'))
    return sweep_df


def _write_csv(frame, path):
    try:
        frame.to_csv(path, index=False, lineterminator='\n')
    except OSError as e:
        raise HarnessError(f"could not write {path}: {e}", "WriteFailed")


def loss_trajectory_frame(records):
    rows = [{'attempt': record.attempt, 'evaluation_index': index, 'loss': value}
            for record in records for index, value in record.trajectory.evaluations]
    return pandas.DataFrame(rows, columns=['attempt', 'evaluation_index', 'loss'])


def test_distances_frame(records):
    rows = [{'attempt': record.attempt, 'point_index': index, 'distance': float(distance)}
            for record in records if record.succeeded for index, distance in enumerate(record.test_distances)]
    return pandas.DataFrame(rows, columns=['attempt', 'point_index', 'distance'])


def distance_by_point_frame(records):
    """Average and median distance per test point over attempts, with log10 columns."""
    distances = test_distances_frame(records)
    by_point = distances.groupby('point_index')['distance'].agg(['mean', 'median']).reset_index()
    by_point.columns = ['point_index', 'average', 'median']
    by_point['log10_average'] = np.log10(np.maximum(by_point['average'], LOG10_FLOOR))
    by_point['log10_median'] = np.log10(np.maximum(by_point['median'], LOG10_FLOOR))
    return by_point


def loss_vs_trial_frame(records):
    """Loss per trial with the running best, one block per attempt."""
    frame = loss_trajectory_frame(records).rename(columns={'evaluation_index': 'trial'})
    frame['best_loss'] = frame.groupby('attempt')['loss'].cummin()
    return frame


def emit_reports(records, stats, config, output_dir):
    """Writes the CSV, JSON and plot-data files of a run.

    Returns:
        dict mapping artifact name to path

    Raises:
        HarnessError: a file could not be written
    """

    plotdata_dir = os.path.join(output_dir, PLOTDATA_DIR)
    try:
        os.makedirs(plotdata_dir, exist_ok=True)
    except OSError as e:
        raise HarnessError(f"could not create {plotdata_dir}: {e}", "WriteFailed")

    paths = {
        'loss_trajectory': os.path.join(output_dir, 'loss_trajectory.csv'),
        'test_distances': os.path.join(output_dir, 'test_distances.csv'),
        'summary': os.path.join(output_dir, 'summary.json'),
        'loss_vs_trial': os.path.join(plotdata_dir, 'loss_vs_trial.csv'),
        'distance_by_point': os.path.join(plotdata_dir, 'distance_by_point.csv'),
    }

    _write_csv(loss_trajectory_frame(records), paths['loss_trajectory'])
    _write_csv(test_distances_frame(records), paths['test_distances'])
    _write_csv(loss_vs_trial_frame(records), paths['loss_vs_trial'])
    _write_csv(distance_by_point_frame(records), paths['distance_by_point'])

    is_classification = config.task.kind == 'classify'
    attempts = []
    for record in records:
        entry = {'attempt': record.attempt,
                 'seed': record.seed,
                 'status': record.status,
                 'test_total': record.test_total if record.succeeded else None,
                 'best_loss': record.trajectory.best_loss,
                 'num_evaluations': record.trajectory.num_evaluations,
                 'optimizer_status': record.trajectory.status}
        if is_classification and record.succeeded:
            entry['correct_count'] = record.correct_count
        if not record.succeeded:
            entry['error'] = record.error
        attempts.append(entry)

    summary = {
        'library': version_info.name,
        'library_version': LIB_VERSION,
        'config': config.to_dict(include_output_dir=False),
        'stats': asdict(stats),
        'attempts': attempts,
        'seeds': [record.seed for record in records],
        'failed_attempts': [record.attempt for record in records if not record.succeeded],
        'elapsed_seconds': [record.elapsed_seconds for record in records],
    }
    _write_json(paths['summary'], summary)

    logger.info("Reports written to %s", output_dir)
    return paths


def regenerate_reports(output_dir):
    """Rebuilds every report of a run directory from its attempt files."""
    config = load_config(os.path.join(output_dir, 'summary.json'))
    records = load_attempt_records(output_dir)
    stats = summarize(records, config.task.kind == 'classify')
    return emit_reports(records, stats, config, output_dir), stats


def make_run_directory(base_dir, config, now=None):
    """Creates a fresh timestamped directory for one run; never reuses one."""
    now = now if now is not None else datetime.datetime.now()
    name = f"{now.strftime('%Y%m%d%H%M%S')}_{config.method}_{config.task.kind}_{config.task.target_id}"
    path = os.path.join(base_dir, name)
    suffix = 1
    while os.path.exists(path):
        path = os.path.join(base_dir, f"{name}_{suffix}")
        suffix += 1
    os.makedirs(path)
    return path


def print_summary_table(stats, title="Summary table"):
    """Prints SummaryStats as a table."""

    # Import pretty table when necessary:
    from prettytable import PrettyTable

    summary_table = PrettyTable()
    summary_table.title = title
    summary_table.field_names = ['Ave.', 'Med.', 'Min.', 'Max.', 'Attempts', 'Failed']
    summary_table.add_row([f"{stats.average:.6f}", f"{stats.median:.6f}", f"{stats.minimum:.6f}",
                           f"{stats.maximum:.6f}", stats.num_attempts, stats.num_failed])
    if stats.mean_correct is not None:
        summary_table.add_column('Correct (mean)', [f"{stats.mean_correct:.1f}"])
    print(summary_table)
