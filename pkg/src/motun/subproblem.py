"""Direction-finding subproblem and the simplex-constrained QP behind it.

The direction at ``x`` is the minimizer of

    max{ grad f_k(x)^T d,  g_i(x) + grad g_i(x)^T d } + 0.5 * ||d||^2

over all objective pieces ``k`` and constraint pieces ``i``. Stacking piece
gradients as rows of ``G`` and offsets as ``a`` (zero for objectives), its dual
is a QP over the unit simplex::

    min_w  0.5 w^T (G G^T) w - a^T w,   w >= 0, sum(w) = 1

and the primal direction is ``d = -G^T w``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SubproblemFailure
from .problem import EvalRecord

QP_TOL = 1e-10
QP_MAX_ITER = 10_000
PROX_REG = 1e-13


@dataclass(frozen=True)
class SimplexQP:
    """``min 0.5 w^T Q w + c^T w`` over the unit simplex."""

    Q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if Q.shape != (c.size, c.size) or c.size < 1:
            raise ValueError("Q must be q x q and c of length q >= 1")
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "c", c)

    @property
    def q(self) -> int:
        return self.c.size

    def objective(self, w: np.ndarray) -> float:
        return float(0.5 * w @ self.Q @ w + self.c @ w)


@dataclass(frozen=True)
class DirectionResult:
    d: np.ndarray
    theta: float
    weights: np.ndarray


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{w >= 0, sum(w) = 1}`` (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def _scale(qp: SimplexQP) -> float:
    return max(1.0, float(np.max(np.abs(qp.Q))), float(np.max(np.abs(qp.c))))


def kkt_residual(qp: SimplexQP, w: np.ndarray) -> float:
    """Frank-Wolfe gap ``grad.w - min(grad)``, scaled by the problem size.

    The gap bounds the suboptimality of ``w`` and, for the direction
    subproblem, equals the primal-dual gap of the min-max model.
    """
    grad = qp.Q @ w + qp.c
    return float(grad @ w - np.min(grad)) / _scale(qp)


def _active_set(qp: SimplexQP, w0: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Primal active-set method with proximally regularized steps.

    The tiny proximal term keeps each equality-constrained step well defined
    when the Gram matrix is singular. ``w0`` must be feasible.
    """
    q = qp.q
    scale = _scale(qp)
    rho = PROX_REG * scale
    w = w0.copy()
    free = w > 0.0
    freed = -1
    for _ in range(max_iter):
        grad = qp.Q @ w + qp.c
        if float(grad @ w - np.min(grad)) <= 1e-3 * tol * scale:
            return w
        F = np.flatnonzero(free)
        k = F.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = qp.Q[np.ix_(F, F)] + rho * np.eye(k)
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.concatenate([-grad[F], [0.0]])
        step = np.linalg.solve(kkt, rhs)[:k]
        spread = float(np.ptp(grad[F]))
        if spread <= 1e-13 * scale or np.array_equal(w[F] + step, w[F]):
            mult = grad - float(np.mean(grad[F]))
            mult[F] = 0.0
            j = int(np.argmin(mult))
            if mult[j] >= -1e-12 * scale:
                return w
            free[j] = True
            freed = j
            continue
        full = np.zeros(q)
        full[F] = step
        alpha, blocking = 1.0, -1
        for i in F:
            if full[i] < 0.0:
                ratio = -w[i] / full[i]
                if ratio < alpha:
                    alpha, blocking = ratio, i
        if blocking == freed and alpha == 0.0:
            # The index just released wants to leave again: no descent
            # direction exists at working precision.
            return w
        freed = -1
        w = np.maximum(w + alpha * full, 0.0)
        if blocking >= 0:
            w[blocking] = 0.0
            free[blocking] = False
        w /= w.sum()
    # Out of budget: typically drifting along a degenerate optimal face, so
    # the caller's residual check decides.
    return w


def _two_piece(qp: SimplexQP) -> np.ndarray:
    # Closed form on the segment w = (s, 1 - s); exact for symmetric pairs.
    Q, c = qp.Q, qp.c
    curv = Q[0, 0] - 2.0 * Q[0, 1] + Q[1, 1]
    slope = Q[0, 1] - Q[1, 1] + c[0] - c[1]
    if curv > 0.0:
        s = min(1.0, max(0.0, -slope / curv))
    else:
        s = 1.0 if slope < 0.0 else 0.0
    return np.array([s, 1.0 - s])


def _fista(qp: SimplexQP, lipschitz: float, tol: float, max_iter: int,
           w0: np.ndarray) -> np.ndarray | None:
    w = w0.copy()
    y = w.copy()
    t = 1.0
    for it in range(1, max_iter + 1):
        grad = qp.Q @ y + qp.c
        w_next = project_simplex(y - grad / lipschitz)
        # Gradient-based restart keeps the momentum from overshooting.
        if (y - w_next) @ (w_next - w) > 0:
            t = 1.0
            y = w_next.copy()
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = w_next + ((t - 1.0) / t_next) * (w_next - w)
            t = t_next
        w = w_next
        if it % 10 == 0 and kkt_residual(qp, w) <= tol:
            return w
    return w if kkt_residual(qp, w) <= tol else None


def solve_simplex_qp(qp: SimplexQP, tol: float = QP_TOL, max_iter: int = QP_MAX_ITER,
                     w0: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Minimize ``0.5 w^T Q w + c^T w`` over the unit simplex.

    Two pieces have a closed form. Otherwise an exact primal active-set method
    runs first, started at the best vertex or at the warm start ``w0`` if that
    is a feasible point with a lower value. Its answer is accepted once
    :func:`kkt_residual` is below ``tol``; otherwise accelerated projected
    gradient (FISTA with adaptive restart) continues from it.

    Returns
    -------
    weights : ndarray
    value : float

    Raises
    ------
    SubproblemFailure
        If neither method meets ``tol`` within ``max_iter`` iterations.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = qp.q
    if q == 1:
        w = np.ones(1)
        return w, qp.objective(w)
    if q == 2:
        w = _two_piece(qp)
        return w, qp.objective(w)
    lipschitz = float(np.linalg.eigvalsh(qp.Q)[-1])
    start = np.zeros(q)
    start[int(np.argmin(0.5 * np.diag(qp.Q) + qp.c))] = 1.0
    if w0 is not None:
        w0 = np.asarray(w0, dtype=float)
        if (w0.shape == (q,) and np.all(w0 >= 0.0) and abs(w0.sum() - 1.0) <= 1e-12
                and qp.objective(w0) < qp.objective(start)):
            start = w0 / w0.sum()
    if lipschitz <= 1e-300:
        return start, qp.objective(start)

    budget = max(1, min(max_iter, 20 * q + 100))
    w = _active_set(qp, start, tol, budget)
    if kkt_residual(qp, w) > tol:
        w = _fista(qp, lipschitz, tol, max_iter, w)
    if w is None:
        raise SubproblemFailure(
            f"simplex QP not solved to {tol:g} within {max_iter} iterations")
    return w, qp.objective(w)


def direction_pieces(record: EvalRecord) -> tuple[np.ndarray, np.ndarray]:
    """Piece gradients (rows) and offsets of the min-max model at ``record``."""
    G = np.vstack([record.Jf, record.Jg])
    a = np.concatenate([np.zeros(record.fvals.size), record.gvals])
    return G, a


def solve_direction(record: EvalRecord, tol: float = QP_TOL, max_iter: int = QP_MAX_ITER,
                    warm_start: np.ndarray | None = None) -> DirectionResult:
    """Steepest feasible-descent direction at the point cached in ``record``.

    ``theta`` is the optimal value of the regularized min-max model, taken
    from the dual side; it is non-positive at feasible points and zero
    exactly at stationary ones.
    ``warm_start`` may carry the weights of a previous, nearby solve.
    """
    G, a = direction_pieces(record)
    w, _ = solve_simplex_qp(SimplexQP(G @ G.T, -a), tol=tol, max_iter=max_iter,
                            w0=warm_start)
    d = -(G.T @ w)
    # Dual value: a lower bound on the optimum that is never positive at a
    # feasible point. The primal value max(G d + a) + 0.5 ||d||^2 amplifies
    # tiny errors in w by ||G||^2 and can come out positive there.
    theta = float(a @ w - 0.5 * (d @ d))
    return DirectionResult(d=d, theta=theta, weights=w)
