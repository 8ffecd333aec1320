"""Fritz-John / criticality certificates and the MFCQ test.

Multipliers are normalized onto the unit simplex, which turns the homogeneous
Fritz-John system into a small QP: the certificate residual is

    min || sum_k lambda_k grad f_k + sum_{i active} mu_i grad g_i ||
    over lambda, mu >= 0 with sum(lambda) + sum(mu) = 1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problem import EvalRecord
from .subproblem import SimplexQP, solve_simplex_qp

TOL_ACTIVE = 1e-6
TOL_RES = 1e-5
LAMBDA_FLOOR = 1e-8


class Classification(str, enum.Enum):
    CRITICAL = "Critical"
    FRITZ_JOHN_ONLY = "FritzJohnOnly"
    NON_STATIONARY = "NonStationary"


@dataclass(frozen=True)
class CriticalityCertificate:
    residual: float
    lam: np.ndarray
    mu: np.ndarray
    classification: Classification
    active_set: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "classification": self.classification.value,
            "active_set": list(self.active_set),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CriticalityCertificate":
        return cls(
            residual=float(data["residual"]),
            lam=np.asarray(data["lambda"], dtype=float),
            mu=np.asarray(data["mu"], dtype=float),
            classification=Classification(data["classification"]),
            active_set=tuple(int(i) for i in data["active_set"]),
        )


def active_set(record: EvalRecord, tol_active: float = TOL_ACTIVE) -> np.ndarray:
    """Indices ``i`` with ``g_i(x) >= -tol_active``."""
    return np.flatnonzero(record.gvals >= -tol_active)


def _min_norm_combination(G: np.ndarray) -> tuple[np.ndarray, float]:
    w, _ = solve_simplex_qp(SimplexQP(G @ G.T, np.zeros(G.shape[0])))
    return w, float(np.linalg.norm(G.T @ w))


def fj_certificate(record: EvalRecord, tol_active: float = TOL_ACTIVE,
                   tol_res: float = TOL_RES) -> CriticalityCertificate:
    """Normalized Fritz-John multipliers at ``record`` and their classification.

    ``Critical`` needs ``residual <= tol_res`` and some ``lambda_k >= 1e-8``;
    a small residual carried by constraint multipliers alone is
    ``FritzJohnOnly``; anything else is ``NonStationary``.
    """
    if tol_active <= 0:
        raise ValueError("tol_active must be positive")
    m = record.fvals.size
    active = active_set(record, tol_active)
    G = np.vstack([record.Jf, record.Jg[active]])
    w, residual = _min_norm_combination(G)
    lam = w[:m].copy()
    mu = np.zeros(record.gvals.size)
    mu[active] = w[m:]
    if residual > tol_res:
        cls = Classification.NON_STATIONARY
    elif np.max(lam) >= LAMBDA_FLOOR:
        cls = Classification.CRITICAL
    else:
        cls = Classification.FRITZ_JOHN_ONLY
    return CriticalityCertificate(residual=residual, lam=lam, mu=mu,
                                  classification=cls, active_set=tuple(active.tolist()))


def mfcq_holds(record: EvalRecord, tol_active: float = TOL_ACTIVE,
               tol_res: float = TOL_RES) -> bool:
    """Gordan test: MFCQ fails iff active constraint gradients admit a
    nonnegative, nonzero combination summing to zero."""
    active = active_set(record, tol_active)
    if active.size == 0:
        return True
    _, residual = _min_norm_combination(record.Jg[active])
    return residual > tol_res
