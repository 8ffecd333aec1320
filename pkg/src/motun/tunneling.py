"""Tunneling problem built around a weak efficient point ``x*``.

Each objective is replaced by

    T_k(x) = (f_k(x) - f_k(x*)) / ||x - x*||^(2 eta)

and the constraints ``T_k(x) <= 0`` are appended to the original ones, so a
feasible point of the tunneling problem is no worse than ``x*`` in any
objective. ``T_k`` has a pole at ``x*``; evaluations closer than ``eps_pole``
raise :class:`PoleViolation`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, PerturbationFailure, PoleViolation
from .problem import ProblemSpec, clip_to_box

MAX_PERTURBATION_DRAWS = 100


@dataclass(frozen=True)
class TunnelingParams:
    eta: float = 1.2
    eps_pole: float = 1e-8
    delta: Optional[float] = None  # None: 0.05 * box diagonal, or 0.1 without a box

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.eps_pole > 0:
            raise ValueError("eps_pole must be positive")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")

    def radius(self, problem: ProblemSpec) -> float:
        if self.delta is not None:
            return self.delta
        if problem.has_box:
            return 0.05 * float(np.linalg.norm(problem.upper - problem.lower))
        return 0.1


@dataclass(frozen=True, eq=False)
class TunnelingProblem:
    base: ProblemSpec
    pole: np.ndarray
    f_star: np.ndarray
    params: TunnelingParams
    spec: ProblemSpec
    def _distance_sq(self, x: np.ndarray) -> float:
        diff = np.asarray(x, dtype=float) - self.pole
        r2 = float(diff @ diff)
        if r2 < self.params.eps_pole ** 2:
            raise PoleViolation(f"point within {self.params.eps_pole:g} of the tunneling pole")
        return r2

    def values(self, x) -> np.ndarray:
        """``T(x)``; raises :class:`PoleViolation` near the pole."""
        x = np.asarray(x, dtype=float)
        r2 = self._distance_sq(x)
        return (self.base.objective_values(x) - self.f_star) / r2 ** self.params.eta

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r2 = self._distance_sq(x)
        eta = self.params.eta
        T = (self.base.objective_values(x) - self.f_star) / r2 ** eta
        Jf = self.base.objective_jacobian(x)
        return Jf / r2 ** eta - (2.0 * eta / r2) * np.outer(T, x - self.pole)

    def is_tp_feasible(self, x) -> bool:
        """Whether ``x`` satisfies both ``T_k <= 0`` and the base constraints."""
        x = np.asarray(x, dtype=float)
        base_ok = self.base.p == 0 or bool(np.all(self.base.constraint_values(x) <= 0.0))
        return base_ok and bool(np.all(self.values(x) <= 0.0))


def build_tp(base: ProblemSpec, x_star, f_star=None,
             params: Optional[TunnelingParams] = None) -> TunnelingProblem:
    """Construct the tunneling problem with pole ``x_star``.

    The derived :class:`ProblemSpec` has the same box, the base general
    constraints followed by ``T_1 .. T_m`` as extra constraints (``p + m``
    in total), and objectives ``T_1 .. T_m``.
    """
    params = params or TunnelingParams()
    pole = np.array(x_star, dtype=float).reshape(-1)
    if pole.size != base.n:
        raise DimensionMismatch("pole dimension does not match the problem")
    f_star = base.objective_values(pole) if f_star is None else np.array(f_star, dtype=float)
    if f_star.shape != (base.m,):
        raise DimensionMismatch("f_star must have one entry per objective")
    pole.setflags(write=False)
    f_star.setflags(write=False)

    # The derived spec needs the TunnelingProblem's methods, so fill it in afterwards.
    tp = TunnelingProblem(base=base, pole=pole, f_star=f_star, params=params, spec=None)
    q = base.n_general

    def constraints(x):
        T = tp.values(x)
        if q:
            return np.concatenate([np.atleast_1d(base.constraints(x)), T])
        return T

    def constraint_jac(x):
        JT = tp.jacobian(x)
        if q:
            Jg = base.constraint_jacobian(x)[base.p - q:]
            return np.vstack([Jg, JT])
        return JT

    spec = ProblemSpec(
        name=f"TP[{base.name}]",
        n=base.n,
        m=base.m,
        objectives=tp.values,
        objective_jac=tp.jacobian,
        constraints=constraints,
        constraint_jac=constraint_jac,
        n_general=q + base.m,
        lower=base.lower,
        upper=base.upper,
    )
    object.__setattr__(tp, "spec", spec)
    return tp


def tp_gradient(tp: TunnelingProblem, x, k: int) -> np.ndarray:
    """Gradient of ``T_k`` at ``x``::

        grad f_k(x) / ||x - x*||^(2 eta) - 2 eta (x - x*) T_k(x) / ||x - x*||^2
    """
    return tp.jacobian(x)[k]


def perturbed_start(base: ProblemSpec, x_star, params: TunnelingParams,
                    rng: np.random.Generator) -> np.ndarray:
    """Random restart point at distance ``delta`` from ``x_star``, clipped to the box."""
    x_star = np.asarray(x_star, dtype=float)
    delta = params.radius(base)
    for _ in range(MAX_PERTURBATION_DRAWS):
        u = rng.standard_normal(x_star.size)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            continue
        x = clip_to_box(base, x_star + delta * u / norm)
        if np.linalg.norm(x - x_star) >= params.eps_pole:
            return x
    raise PerturbationFailure(
        f"no restart point at least {params.eps_pole:g} away from the pole after "
        f"{MAX_PERTURBATION_DRAWS} draws")
