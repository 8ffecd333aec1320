import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from motun.corpus import get_problem
from motun.errors import DimensionMismatch, NonFiniteEvaluation
from motun.problem import (EvalRecord, ProblemSpec, clip_to_box, evaluate, evaluate_values,
                           fd_jacobians, jacobians_agree, max_violation)


def _square_problem(**kw):
    return ProblemSpec(name="sq", n=1, m=2, objectives=lambda x: np.array([x[0] ** 2, x[0] ** 2]),
                       objective_jac=lambda x: np.array([[2 * x[0]], [2 * x[0]]]), **kw)


def _record(gvals):
    g = np.asarray(gvals, dtype=float)
    return EvalRecord(x=np.zeros(1), fvals=np.zeros(2), gvals=g, Jf=np.zeros((2, 1)),
                      Jg=np.zeros((g.size, 1)))


def test_dtlz1_values_at_corner():
    rec = evaluate(get_problem("DTLZ1n2"), [1.0, 0.0])
    assert_allclose(rec.fvals, [13.0, 0.0], atol=1e-12)


def test_dtlz1_values_at_centre():
    rec = evaluate(get_problem("DTLZ1n2"), [0.5, 0.5])
    assert_allclose(rec.fvals, [0.25, 0.25], atol=1e-12)


def test_dtlz1_jacobian_at_corner_matches_differences():
    problem = get_problem("DTLZ1n2")
    rec = evaluate(problem, [1.0, 0.0])
    Jf_fd, _ = fd_jacobians(problem, [1.0, 0.0])
    assert_allclose(rec.Jf, [[13.0, -50.0], [-13.0, 0.0]], atol=1e-9)
    assert jacobians_agree(rec.Jf, Jf_fd)


def test_box_rows_come_first_and_in_order():
    problem = get_problem("DTLZ1n2")
    rec = evaluate(problem, [0.25, 0.75])
    assert problem.p == 4
    assert_allclose(rec.gvals, [-0.25, -0.75, -0.75, -0.25])
    assert_array_equal(rec.Jg, [[-1, 0], [0, -1], [1, 0], [0, 1]])


def test_fd_quadratic_is_exact():
    Jf, Jg = fd_jacobians(_square_problem(), [3.0], h=1e-6)
    assert abs(Jf[0, 0] - 6.0) <= 1e-9
    assert Jg.shape == (0, 1)


def test_fd_constant_objective_gives_zero_row():
    problem = ProblemSpec(name="c", n=2, m=2, objectives=lambda x: np.array([1.0, x[0]]))
    Jf, _ = fd_jacobians(problem, [0.3, 0.4])
    assert_array_equal(Jf[0], [0.0, 0.0])


def test_fd_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        fd_jacobians(_square_problem(), [1.0], h=0.0)


def test_missing_jacobian_falls_back_to_differences():
    problem = ProblemSpec(name="nofd", n=2, m=2,
                          objectives=lambda x: np.array([x[0] * x[1], np.sin(x[0])]))
    rec = evaluate(problem, [0.5, 2.0])
    assert_allclose(rec.Jf, [[2.0, 0.5], [np.cos(0.5), 0.0]], rtol=1e-8)


@pytest.mark.parametrize("gvals, expected", [((-1.0, -2.0), 0.0), ((0.3, -1.0), 0.3), ((), 0.0)])
def test_max_violation(gvals, expected):
    assert max_violation(_record(gvals)) == expected


def test_clip_to_box():
    problem = get_problem("DTLZ1n2")
    assert_array_equal(clip_to_box(problem, [1.2, -0.1]), [1.0, 0.0])
    assert_array_equal(clip_to_box(problem, [0.3, 0.6]), [0.3, 0.6])
    assert_array_equal(clip_to_box(_square_problem(), [7.0]), [7.0])


def test_evaluate_is_pure():
    problem = get_problem("ZDT3")
    x = np.linspace(0.1, 0.9, problem.n)
    assert evaluate(problem, x).same_as(evaluate(problem, x))


def test_non_finite_values_are_rejected():
    problem = ProblemSpec(name="bad", n=1, m=2, objectives=lambda x: np.array([np.log(x[0]), x[0]]),
                          objective_jac=lambda x: np.array([[1 / x[0]], [1.0]]))
    with pytest.raises(NonFiniteEvaluation):
        evaluate(problem, [-1.0])
    with pytest.raises(NonFiniteEvaluation):
        evaluate_values(problem, [0.0])


def test_dimension_checked():
    with pytest.raises(DimensionMismatch):
        evaluate(get_problem("DTLZ1n2"), [0.1, 0.2, 0.3])


@pytest.mark.parametrize("kwargs", [
    dict(m=1),
    dict(n=0),
    dict(lower=[0.0]),
    dict(lower=[1.0], upper=[0.0]),
    dict(n_general=1),
])
def test_spec_validation(kwargs):
    base = dict(name="x", n=1, m=2, objectives=lambda x: x)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ProblemSpec(**base)


def test_general_constraints_follow_box():
    problem = ProblemSpec(name="g", n=2, m=2, objectives=lambda x: x,
                          objective_jac=lambda x: np.eye(2),
                          constraints=lambda x: np.array([x[0] + x[1] - 1.0]),
                          constraint_jac=lambda x: np.array([[1.0, 1.0]]),
                          n_general=1, lower=[0.0, 0.0], upper=[1.0, 1.0])
    rec = evaluate(problem, [0.75, 0.5])
    assert problem.p == 5
    assert rec.gvals[-1] == pytest.approx(0.25)
    assert_array_equal(rec.Jg[-1], [1.0, 1.0])


@given(st.lists(st.floats(-0.5, 1.5, allow_nan=False), min_size=2, max_size=2))
def test_violation_zero_iff_inside_box(x):
    problem = get_problem("DTLZ2n2")
    rec = evaluate(problem, x)
    inside = all(0.0 <= v <= 1.0 for v in x)
    assert (max_violation(rec) == 0.0) == inside
