"""Constrained multi-objective descent with an Armijo line search."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonFiniteEvaluation, PoleViolation
from .problem import (EvalRecord, ProblemSpec, clip_to_box, evaluate, evaluate_values,
                      max_violation)
from .subproblem import DirectionResult, solve_direction

logger = logging.getLogger(__name__)


class Status(str, enum.Enum):
    CRITICAL = "Critical"
    ITER_LIMIT = "IterLimit"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class DescentOptions:
    eps_crit: float = 1e-11
    max_iter: int = 500
    armijo_sigma: float = 1e-4
    backtrack_factor: float = 0.5
    min_step: float = 1e-12

    def __post_init__(self):
        if self.eps_crit <= 0 or self.min_step <= 0:
            raise ValueError("eps_crit and min_step must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        for name in ("armijo_sigma", "backtrack_factor"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class DescentResult:
    """Outcome of :func:`minimize`.

    ``theta_final`` is the subproblem value at ``x_final``. At a feasible point
    criticality means ``|theta_final| <= eps_crit``; at an infeasible one the
    stationarity gap ``violation - theta_final`` is used instead and
    ``feasible`` is ``False``.
    """

    x_final: np.ndarray
    record: EvalRecord
    status: Status
    iterations: int
    theta_final: float
    feasible: bool = True
    f_history: Optional[np.ndarray] = None


def _accepts(record: EvalRecord, fvals: np.ndarray, gvals: np.ndarray, t: float,
             theta: float, sigma: float) -> bool:
    viol = max_violation(record)
    if viol == 0.0:
        return ((gvals.size == 0 or float(np.max(gvals)) <= 0.0)
                and bool(np.all(fvals <= record.fvals + sigma * t * theta)))
    # Infeasible start: sufficient decrease of the improvement function
    # max(f_k(y) - f_k(x), g_i(y)), whose value at x is the violation.
    improvement = max(float(np.max(fvals - record.fvals)), float(np.max(gvals)))
    return improvement <= viol + sigma * t * (theta - viol)


def line_search(problem: ProblemSpec, record: EvalRecord, direction: DirectionResult,
                opts: DescentOptions) -> tuple[float, Optional[EvalRecord]]:
    """Backtracking search returning the accepted step and the record there.

    Trial points are clipped to the box before evaluation. A trial point that
    cannot be evaluated (non-finite value, or inside a tunneling pole) counts
    as a rejection. Returns ``(0.0, None)`` when the step underflows or the
    clipped trial point no longer moves.
    """
    t = 1.0
    while t >= opts.min_step:
        y = clip_to_box(problem, record.x + t * direction.d)
        if np.array_equal(y, record.x):
            # Clipping (or underflow) left x unchanged; shorter steps cannot move either.
            break
        try:
            fvals, gvals = evaluate_values(problem, y)
            if _accepts(record, fvals, gvals, t, direction.theta, opts.armijo_sigma):
                return t, evaluate(problem, y)
        except (NonFiniteEvaluation, PoleViolation):
            pass
        t *= opts.backtrack_factor
    return 0.0, None


def armijo_backtrack(problem: ProblemSpec, x, d, theta: float,
                     opts: Optional[DescentOptions] = None) -> float:
    """Largest ``t`` in ``{1, beta, beta^2, ...}`` passing the Armijo test, or 0."""
    opts = opts or DescentOptions()
    record = evaluate(problem, clip_to_box(problem, x))
    direction = DirectionResult(d=np.asarray(d, dtype=float).reshape(-1),
                                theta=float(theta), weights=np.zeros(0))
    return line_search(problem, record, direction, opts)[0]


def _is_stationary(record: EvalRecord, theta: float, eps: float) -> bool:
    return max_violation(record) - theta <= eps


def minimize(problem: ProblemSpec, x0, opts: Optional[DescentOptions] = None,
             keep_history: bool = False) -> DescentResult:
    """Run the descent loop from ``x0`` until criticality or a budget runs out.

    ``x0`` is clipped to the box first. Feasible iterates stay feasible and
    every objective decreases along accepted steps; from an infeasible start
    the constraint pieces of the subproblem drive the violation down.
    """
    opts = opts or DescentOptions()
    record = evaluate(problem, clip_to_box(problem, x0))
    history = [record.fvals] if keep_history else None
    status = Status.ITER_LIMIT
    theta = float("nan")
    iterations = 0
    weights = None
    for iterations in range(opts.max_iter + 1):
        direction = solve_direction(record, warm_start=weights)
        weights = direction.weights
        theta = direction.theta
        if _is_stationary(record, theta, opts.eps_crit):
            status = Status.CRITICAL
            break
        if iterations == opts.max_iter:
            break
        trial = line_search(problem, record, direction, opts)[1]
        if trial is None:
            status = Status.STEP_FAILURE
            break
        record = trial
        if keep_history:
            history.append(record.fvals)
    logger.debug("%s: %s after %d iterations (theta=%.3g)", problem.name, status.value,
                 iterations, theta)
    return DescentResult(
        x_final=record.x,
        record=record,
        status=status,
        iterations=iterations,
        theta_final=theta,
        feasible=max_violation(record) == 0.0,
        f_history=np.array(history) if keep_history else None,
    )
