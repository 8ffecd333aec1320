"""Problem model for constrained multi-objective optimization.

A problem has ``m`` objectives and ``p`` inequality constraints ``g_i(x) <= 0``.
Evaluators are vector valued: ``objectives(x)`` returns all ``m`` values and
``objective_jac(x)`` the ``m x n`` Jacobian, and likewise for constraints.

Box bounds are kept twice: structurally (``lower``/``upper``, used for clipping
and start generation) and as explicit constraints, ordered as
``lower - x <= 0`` for every coordinate followed by ``x - upper <= 0``.
General constraints come after the box rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, NonFiniteEvaluation

VectorFn = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1e-6


@dataclass(frozen=True)
class ProblemSpec:
    """An ``m``-objective, ``p``-constraint problem.

    Parameters
    ----------
    name : str
        Identifier used in reports and the corpus registry.
    n, m : int
        Decision dimension and objective count (``m >= 2``).
    objectives : callable
        ``x -> array(m)``.
    objective_jac : callable or None
        ``x -> array(m, n)``. ``None`` selects central finite differences.
    constraints, constraint_jac : callable or None
        General (non-box) constraints ``x -> array(q)`` and their Jacobian.
    n_general : int
        Number of general constraints ``q``.
    lower, upper : array or None
        Optional box. Both or neither must be given.
    """

    name: str
    n: int
    m: int
    objectives: VectorFn
    objective_jac: Optional[VectorFn] = None
    constraints: Optional[VectorFn] = None
    constraint_jac: Optional[VectorFn] = None
    n_general: int = 0
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.n_general < 0:
            raise ValueError("n_general must be >= 0")
        if self.n_general > 0 and self.constraints is None:
            raise ValueError("n_general > 0 requires a constraint evaluator")
        if (self.lower is None) != (self.upper is None):
            raise ValueError("lower and upper must be given together")
        if self.lower is not None:
            lo = np.array(self.lower, dtype=float)
            hi = np.array(self.upper, dtype=float)
            if lo.shape != (self.n,) or hi.shape != (self.n,):
                raise DimensionMismatch("box bounds must have shape (n,)")
            if not np.all(lo < hi):
                raise ValueError("box requires lower < upper componentwise")
            lo.setflags(write=False)
            hi.setflags(write=False)
            object.__setattr__(self, "lower", lo)
            object.__setattr__(self, "upper", hi)

    @property
    def has_box(self) -> bool:
        return self.lower is not None

    @property
    def p(self) -> int:
        return self.n_general + (2 * self.n if self.has_box else 0)

    def constraint_values(self, x: np.ndarray) -> np.ndarray:
        parts = []
        if self.has_box:
            parts += [self.lower - x, x - self.upper]
        if self.n_general:
            parts.append(np.atleast_1d(np.asarray(self.constraints(x), dtype=float)))
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)

    def constraint_jacobian(self, x: np.ndarray) -> np.ndarray:
        parts = []
        if self.has_box:
            eye = np.eye(self.n)
            parts += [-eye, eye]
        if self.n_general:
            if self.constraint_jac is None:
                parts.append(_central_jacobian(self.constraints, x, self.n_general))
            else:
                parts.append(np.asarray(self.constraint_jac(x), dtype=float).reshape(self.n_general, self.n))
        if not parts:
            return np.zeros((0, self.n))
        return np.vstack(parts)

    def objective_values(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.objectives(x), dtype=float).reshape(self.m)

    def objective_jacobian(self, x: np.ndarray) -> np.ndarray:
        if self.objective_jac is None:
            return _central_jacobian(self.objectives, x, self.m)
        return np.asarray(self.objective_jac(x), dtype=float).reshape(self.m, self.n)


@dataclass(frozen=True, eq=False)
class EvalRecord:
    """Objective/constraint values and Jacobians cached at one point."""

    x: np.ndarray
    fvals: np.ndarray
    gvals: np.ndarray
    Jf: np.ndarray
    Jg: np.ndarray

    @property
    def n(self) -> int:
        return self.x.size

    def same_as(self, other: "EvalRecord") -> bool:
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("x", "fvals", "gvals", "Jf", "Jg")
        )


def _as_point(problem: ProblemSpec, x) -> np.ndarray:
    x = np.array(x, dtype=float).reshape(-1)
    if x.size != problem.n:
        raise DimensionMismatch(f"expected a point of dimension {problem.n}, got {x.size}")
    return x


def evaluate(problem: ProblemSpec, x) -> EvalRecord:
    """Evaluate all quantities of ``problem`` at ``x``.

    Raises
    ------
    NonFiniteEvaluation
        If any value or Jacobian entry is NaN or infinite.
    """
    x = _as_point(problem, x)
    with np.errstate(all="ignore"):
        fvals = problem.objective_values(x)
        gvals = problem.constraint_values(x)
        Jf = problem.objective_jacobian(x)
        Jg = problem.constraint_jacobian(x)
    for label, arr in (("objective", fvals), ("constraint", gvals),
                       ("objective Jacobian", Jf), ("constraint Jacobian", Jg)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteEvaluation(f"{problem.name}: non-finite {label} at x={x.tolist()}")
    x.setflags(write=False)
    return EvalRecord(x=x, fvals=fvals, gvals=gvals, Jf=Jf, Jg=Jg)


def evaluate_values(problem: ProblemSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """Objective and constraint values only (no Jacobians)."""
    x = _as_point(problem, x)
    with np.errstate(all="ignore"):
        fvals = problem.objective_values(x)
        gvals = problem.constraint_values(x)
    if not (np.isfinite(fvals).all() and np.isfinite(gvals).all()):
        raise NonFiniteEvaluation(f"{problem.name}: non-finite value at x={x.tolist()}")
    return fvals, gvals


def _central_jacobian(fn: VectorFn, x: np.ndarray, rows: int, h: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    jac = np.empty((rows, x.size))
    for j in range(x.size):
        step = h * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        fp = np.asarray(fn(xp), dtype=float).reshape(rows)
        fm = np.asarray(fn(xm), dtype=float).reshape(rows)
        jac[:, j] = (fp - fm) / (2.0 * step)
    return jac


def fd_jacobians(problem: ProblemSpec, x, h: float = FD_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Jacobians of objectives and constraints.

    The step along coordinate ``j`` is ``h * max(1, |x_j|)``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = _as_point(problem, x)
    with np.errstate(all="ignore"):
        Jf = _central_jacobian(problem.objective_values, x, problem.m, h)
        Jg = _central_jacobian(problem.constraint_values, x, problem.p, h)
    if not (np.all(np.isfinite(Jf)) and np.all(np.isfinite(Jg))):
        raise NonFiniteEvaluation(f"{problem.name}: non-finite difference quotient at x={x.tolist()}")
    return Jf, Jg


def max_violation(record: EvalRecord) -> float:
    """``max(0, max_i g_i(x))``; zero exactly when the point is feasible."""
    if record.gvals.size == 0:
        return 0.0
    return max(0.0, float(np.max(record.gvals)))


def clip_to_box(problem: ProblemSpec, x) -> np.ndarray:
    x = np.array(x, dtype=float).reshape(-1)
    if not problem.has_box:
        return x
    return np.clip(x, problem.lower, problem.upper)


def jacobians_agree(analytic: np.ndarray, numeric: np.ndarray,
                    rtol: float = 1e-5, atol: float = 1e-7) -> bool:
    """Entrywise check ``|a - b| <= max(atol, rtol * |a|)``."""
    tol = np.maximum(atol, rtol * np.abs(analytic))
    return bool(np.all(np.abs(analytic - numeric) <= tol))
