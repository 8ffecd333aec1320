import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from motun.corpus import get_problem
from motun.criticality import Classification, fj_certificate
from motun.descent import DescentOptions, Status, armijo_backtrack, minimize
from motun.problem import ProblemSpec, max_violation


def _two_wells():
    def f(x):
        return np.array([(x[0] - 1) ** 2 + x[1] ** 2, (x[0] + 1) ** 2 + x[1] ** 2])

    def jac(x):
        return np.array([[2 * (x[0] - 1), 2 * x[1]], [2 * (x[0] + 1), 2 * x[1]]])

    return ProblemSpec(name="wells", n=2, m=2, objectives=f, objective_jac=jac)


def _parabola(**kw):
    return ProblemSpec(name="x2", n=1, m=2, objectives=lambda x: np.array([x[0] ** 2] * 2),
                       objective_jac=lambda x: np.array([[2 * x[0]]] * 2), **kw)


def test_critical_start_stays_put():
    res = minimize(_two_wells(), [0.0, 0.0])
    assert res.status is Status.CRITICAL
    assert res.iterations == 0
    assert_allclose(res.x_final, [0.0, 0.0])


def test_descends_onto_pareto_segment():
    res = minimize(_two_wells(), [0.0, 1.0])
    assert res.status is Status.CRITICAL
    assert_allclose(res.x_final, [0.0, 0.0], atol=1e-4)


def test_dtlz1_corner_start():
    res = minimize(get_problem("DTLZ1n2"), [0.9956, 0.0018])
    assert np.linalg.norm(res.x_final - [1.0, 0.0]) <= 1e-2


def test_armijo_full_step():
    assert armijo_backtrack(_parabola(), [1.0], [-1.0], -1.0) == 1.0


def test_armijo_backtracks_twice():
    assert armijo_backtrack(_parabola(), [1.0], [-4.0], -4.0) == 0.25


def test_armijo_clips_to_box():
    boxed = _parabola(lower=[0.5], upper=[2.0])
    # x + d = -1 is clipped to 0.5, where f = 0.25 <= 1 - sigma.
    assert armijo_backtrack(boxed, [1.0], [-2.0], -1.0) == 1.0


def test_step_failure_when_every_trial_is_nan():
    def f(x):
        return np.array([x[0] ** 2, 2 * x[0] ** 2]) if x[0] >= 1.0 else np.full(2, np.nan)

    problem = ProblemSpec(name="nan", n=1, m=2, objectives=f,
                          objective_jac=lambda x: np.array([[2 * x[0]], [4 * x[0]]]))
    res = minimize(problem, [1.0])
    assert res.status is Status.STEP_FAILURE
    assert_allclose(res.x_final, [1.0])


def test_iteration_limit():
    res = minimize(get_problem("DTLZ1n2"), [0.9, 0.9], DescentOptions(max_iter=1))
    assert res.status is Status.ITER_LIMIT
    assert res.iterations == 1


@pytest.mark.parametrize("kwargs", [
    dict(eps_crit=0.0), dict(min_step=-1.0), dict(max_iter=0),
    dict(armijo_sigma=1.0), dict(backtrack_factor=0.0),
])
def test_option_validation(kwargs):
    with pytest.raises(ValueError):
        DescentOptions(**kwargs)


def test_infeasible_start_is_restored():
    problem = ProblemSpec(name="half", n=2, m=2, objectives=lambda x: np.array([x[0] ** 2, x[1] ** 2]),
                          objective_jac=lambda x: np.diag(2 * np.asarray(x)),
                          constraints=lambda x: np.array([1.0 - x[0] - x[1]]),
                          constraint_jac=lambda x: np.array([[-1.0, -1.0]]),
                          n_general=1)
    res = minimize(problem, [0.0, 0.0])
    assert res.status is Status.CRITICAL
    # The linearized step lands on x1 + x2 = 1 up to rounding.
    assert max_violation(res.record) <= 1e-10
    assert_allclose(res.x_final, [0.5, 0.5], atol=1e-8)


@settings(max_examples=20)
@given(st.sampled_from(["DTLZ2n2", "Fonseca", "MOP2", "DTLZ1n2"]),
       st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2))
def test_monotone_and_feasible(name, u):
    problem = get_problem(name)
    x0 = problem.lower + np.array(u) * (problem.upper - problem.lower)
    res = minimize(problem, x0, DescentOptions(max_iter=100), keep_history=True)
    steps = np.diff(res.f_history, axis=0)
    assert np.all(steps <= 1e-12)
    # Near criticality sigma * t * theta falls below one ulp of f, so the
    # strict decrease is only visible over the whole run.
    if res.iterations:
        assert np.any(res.f_history[-1] < res.f_history[0])
    assert max_violation(res.record) == 0.0


@settings(max_examples=15)
@given(st.sampled_from(["DTLZ2n2", "Fonseca", "ex005"]),
       st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2))
def test_critical_certifies(name, u):
    problem = get_problem(name)
    x0 = problem.lower + np.array(u) * (problem.upper - problem.lower)
    res = minimize(problem, x0)
    if res.status is Status.CRITICAL:
        assert abs(res.theta_final) <= DescentOptions().eps_crit
        cert = fj_certificate(res.record)
        assert cert.residual <= 1e-5
        assert cert.classification is not Classification.NON_STATIONARY


def test_stalled_clipped_step_is_a_step_failure():
    # Decreasing objectives pinned at the upper bound: every trial point clips back to x.
    problem = ProblemSpec(name="wall", n=1, m=2, objectives=lambda x: np.array([-x[0], -2 * x[0]]),
                          objective_jac=lambda x: np.array([[-1.0], [-2.0]]), lower=[0.0], upper=[1.0])
    res = armijo_backtrack(problem, [1.0], [1.0], -0.5)
    assert res == 0.0
