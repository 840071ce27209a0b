"""Derivative-free Minimization

Wraps scipy's COBYLA (linear interpolation models over a simplex inside a
shrinking trust region) and records every objective evaluation.

The search space is unconstrained. Stopping: the trust radius falls below
final_radius, or max_evaluations objective calls have been made.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.optimize

from python_evqkan.errors import OptimizerError

logger = logging.getLogger(__name__)

# Termination status values stored in a Trajectory:
#   converged:    scipy reported success (trust radius reached final_radius)
#   budget:       max_evaluations reached
#   non_finite:   the objective returned nan or inf; the run was aborted
#   stopped:      any other scipy termination, message kept in Trajectory.message
STATUSES = ('converged', 'budget', 'non_finite', 'stopped')


@dataclass(frozen=True)
class OptimizerConfig:
    """COBYLA settings.

    Attributes:
        initial_radius: initial trust radius (rhobeg)
        final_radius: trust radius at which the run stops (rhoend)
        max_evaluations: objective evaluation budget
        record_trajectory: keep every (index, loss) pair, else only the best
    """

    initial_radius: float = 1.0
    final_radius: float = 1e-4
    max_evaluations: int = 1000
    record_trajectory: bool = True

    def __post_init__(self):
        if not 0 < self.final_radius < self.initial_radius:
            raise OptimizerError(f"need 0 < final_radius < initial_radius, got {self.final_radius} and "
                                 f"{self.initial_radius}", "RadiusOrder")
        if not isinstance(self.max_evaluations, (int, np.integer)) or self.max_evaluations < 1:
            raise OptimizerError(f"max_evaluations should be a positive integer, got {self.max_evaluations}",
                                 "BudgetType")


@dataclass
class Trajectory:
    """Result of one minimization.

    Attributes:
        evaluations: list of (index, loss) in call order
        best_params: parameters of the lowest loss seen
        best_loss: lowest loss seen
        num_evaluations: number of objective calls
        status: one of STATUSES
        message: termination message
    """

    evaluations: list = field(default_factory=list)
    best_params: np.ndarray = None
    best_loss: float = float('inf')
    num_evaluations: int = 0
    status: str = 'stopped'
    message: str = ''

    def running_best(self):
        """Running minimum of the recorded losses."""
        return np.minimum.accumulate([value for _, value in self.evaluations])


class _StopMinimization(Exception):
    """Raised inside the objective wrapper to end the scipy run"""

    def __init__(self, status, message):
        super().__init__(message)
        self.status = status
        self.message = message


class _RecordingObjective:
    """Counts, records and checks every call of the objective."""

    def __init__(self, objective, config, trajectory):
        self.objective = objective
        self.config = config
        self.trajectory = trajectory

    def __call__(self, x):
        trajectory = self.trajectory
        if trajectory.num_evaluations >= self.config.max_evaluations:
            raise _StopMinimization('budget', "evaluation budget exhausted")

        value = float(self.objective(x))
        index = trajectory.num_evaluations
        trajectory.num_evaluations += 1

        if not np.isfinite(value):
            raise _StopMinimization('non_finite', f"objective returned {value} at evaluation {index}")

        if self.config.record_trajectory:
            trajectory.evaluations.append((index, value))
        if value < trajectory.best_loss:
            trajectory.best_loss = value
            trajectory.best_params = np.array(x, dtype=float)
        return value


def minimize(objective, x0, config=None):
    """Minimizes objective from x0 with COBYLA.

    Deterministic given (objective, x0, config).

    Args:
        objective: callable mapping a float vector to a float
        x0: starting point
        config: OptimizerConfig, defaults when None

    Returns:
        Trajectory; a non-finite objective value ends the run with status
        'non_finite' and the diagnostic in Trajectory.message.

    Raises:
        OptimizerError: x0 not finite, or budget below dim + 2
    """

    config = config if config is not None else OptimizerConfig()
    x0 = np.array(x0, dtype=float).reshape(-1)

    if not np.all(np.isfinite(x0)):
        raise OptimizerError("x0 should be finite", "NonFiniteStart")
    if config.max_evaluations < x0.size + 2:
        raise OptimizerError(f"max_evaluations should be at least dim + 2 = {x0.size + 2}, "
                             f"got {config.max_evaluations}", "BudgetTooSmall")

    trajectory = Trajectory(best_params=x0.copy())
    wrapped = _RecordingObjective(objective, config, trajectory)

    try:
        result = scipy.optimize.minimize(wrapped, x0, method='COBYLA', tol=config.final_radius,
                                         options={'rhobeg': config.initial_radius,
                                                  'maxiter': config.max_evaluations})
    except _StopMinimization as e:
        trajectory.status = e.status
        trajectory.message = e.message
    else:
        if result.success:
            trajectory.status = 'converged'
        elif trajectory.num_evaluations >= config.max_evaluations:
            trajectory.status = 'budget'
        else:
            trajectory.status = 'stopped'
        trajectory.message = str(result.message)

    if trajectory.status == 'non_finite':
        logger.warning("Minimization aborted: %s", trajectory.message)
    logger.debug("COBYLA finished after %d evaluations (%s), best loss %.6g",
                 trajectory.num_evaluations, trajectory.status, trajectory.best_loss)
    return trajectory
