"""B-spline Basis on [0, 1]

Clamped uniform B-spline bases used inside the trainable angle functions.
Evaluation goes through scipy's design matrix, which implements the Cox-de
Boor recursion.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import BSpline

from python_evqkan.errors import InvalidArgumentError

DEFAULT_NUM_BASIS = 8
DEFAULT_ORDER = 3


@dataclass(frozen=True)
class SplineGrid:
    """Clamped uniform B-spline basis on [0, 1].

    Attributes:
        num_basis:
            number of basis functions (N_g)
        order:
            polynomial degree, 3 for cubic splines
    """

    num_basis: int = DEFAULT_NUM_BASIS
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if self.order < 0:
            raise InvalidArgumentError(f"order should be non-negative, got {self.order}", "SplineOrder")
        if self.num_basis < self.order + 1:
            raise InvalidArgumentError(f"a degree {self.order} basis needs at least {self.order + 1} functions, "
                                       f"got {self.num_basis}", "SplineNumBasis")

    @cached_property
    def knots(self):
        """First and last knot repeated order+1 times, uniform interior."""
        interior = np.linspace(0.0, 1.0, self.num_basis - self.order + 1)
        return np.concatenate([np.zeros(self.order), interior, np.ones(self.order)])


def _check_unit_interval(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise InvalidArgumentError(f"spline inputs should lie in [0, 1], got {x}", "OutsideUnitInterval")
    return x


def basis_matrix(grid, xs):
    """Basis values for many points: row i holds B_0..B_{num_basis-1} at xs[i]."""
    xs = np.atleast_1d(_check_unit_interval(xs))
    return BSpline.design_matrix(xs, grid.knots, grid.order).toarray()


def basis_values(grid, x):
    """Vector of the num_basis basis function values at x (sums to 1)."""
    return basis_matrix(grid, [x])[0]


def spline_sum(grid, coefficients, x):
    """Returns sum_s coefficients[s] * B_s(x).

    Raises:
        InvalidArgumentError: coefficient length differs from num_basis, or x
            lies outside [0, 1]
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (grid.num_basis,):
        raise InvalidArgumentError(f"expected {grid.num_basis} coefficients, got shape {coefficients.shape}",
                                   "LengthMismatch")
    return float(coefficients @ basis_values(grid, x))
