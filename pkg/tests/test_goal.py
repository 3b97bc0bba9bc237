from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapartition import (
    DomainError,
    GoalSpec,
    LinearEfficacy,
    ParameterError,
    TabulatedEfficacy,
    alternate_planning_time,
    planning_balance_residual,
    problem_reduction_time,
    solve_goal_generic,
    solve_goal_linear,
    total_time,
)
from metapartition.oracle import grid_min_1d

TOL_TIME = 1e-9

k_os = st.floats(0.0, 2.0)
ls = st.floats(math.log(0.05), math.log(20.0)).map(math.exp)
fs = st.floats(0.01, 0.99)


def test_problem_reduction_time():
    assert problem_reduction_time(LinearEfficacy(1.0, 0.0), 1 - math.exp(-1), 0.0) == pytest.approx(1.0, rel=1e-15)
    assert problem_reduction_time(LinearEfficacy(0.1, 4.0), 0.9, 0.7337) == pytest.approx(0.7587, abs=1e-4)
    assert problem_reduction_time(LinearEfficacy(0.3, 1.0), 1e-12, 2.0) == pytest.approx(0.0, abs=1e-11)


def test_problem_reduction_time_errors():
    with pytest.raises(DomainError):
        problem_reduction_time(LinearEfficacy(0.0, 1.0), 0.5, 0.0)
    for f in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ParameterError):
            problem_reduction_time(LinearEfficacy(1.0, 1.0), f, 0.0)


def test_linear_example_unit_slope():
    s = solve_goal_linear(0.1, 1.0, 0.9)
    assert s.t_m_star == pytest.approx(1.4174, abs=1e-4)
    assert s.t_e_star == pytest.approx(1.5174, abs=1e-4)
    assert s.t_star == pytest.approx(2.9348, abs=1e-4)
    assert s.second_order_ok and not s.at_boundary
    # frozen from the 1-D minimisation oracle
    assert abs(s.t_m_star - 1.4174271281967816) <= 1e-6
    assert s.t_star == pytest.approx(2.9348542587702924, abs=1e-12)


def test_linear_example_steep_slope():
    s = solve_goal_linear(0.1, 4.0, 0.9)
    assert s.t_m_star == pytest.approx(0.7337, abs=1e-4)
    assert s.t_star == pytest.approx(1.4924, abs=1e-4)
    assert abs(s.t_m_star - 0.7337135585090908) <= 1e-6


def test_linear_boundary():
    s = solve_goal_linear(10.0, 1.0, 0.5)
    assert s.t_m_star == 0.0 and s.at_boundary and s.second_order_ok
    assert s.t_star == pytest.approx(math.log(2) / 10)


def test_alternate_form_matches_only_for_unit_slope():
    assert alternate_planning_time(0.1, 1.0, 0.9) == pytest.approx(solve_goal_linear(0.1, 1.0, 0.9).t_m_star, abs=1e-12)
    assert alternate_planning_time(0.1, 4.0, 0.9) == pytest.approx(0.7325, abs=1e-4)
    assert alternate_planning_time(0.0, 4.0, 0.9) == pytest.approx(solve_goal_linear(0.0, 4.0, 0.9).t_m_star, abs=1e-12)


def test_oracle_sides_with_balance_condition():
    spec = GoalSpec(0.9, LinearEfficacy(0.1, 4.0))
    oracle = grid_min_1d(lambda t: total_time(spec, t))
    assert abs(oracle.argument - solve_goal_linear(0.1, 4.0, 0.9).t_m_star) <= 1e-4
    assert abs(oracle.argument - alternate_planning_time(0.1, 4.0, 0.9)) > 5 * oracle.resolution


def test_generic_tabulated_efficacy():
    knots = [(0.01 * i, 0.1 + 4 * 0.01 * i) for i in range(301)]
    s = solve_goal_generic(GoalSpec(0.9, TabulatedEfficacy(knots)))
    assert s.t_m_star == pytest.approx(solve_goal_linear(0.1, 4.0, 0.9).t_m_star, rel=0.01)


def test_generic_useless_planning():
    s = solve_goal_generic(GoalSpec(0.8, LinearEfficacy(0.5, 0.0), t_mm=0.3))
    assert s.t_m_star == 0.0 and s.at_boundary
    assert s.t_star == pytest.approx(-math.log(0.2) / 0.5 + 0.3, rel=1e-15)
    s = solve_goal_generic(GoalSpec(0.8, LinearEfficacy(0.5, 1e-12)))
    assert s.t_m_star == 0.0


def test_generic_unreachable_goal():
    with pytest.raises(DomainError):
        solve_goal_generic(GoalSpec(0.8, LinearEfficacy(0.0, 0.0)))


def test_spec_validation():
    with pytest.raises(ParameterError):
        GoalSpec(1.0, LinearEfficacy(1.0, 1.0))
    with pytest.raises(ParameterError):
        GoalSpec(0.5, LinearEfficacy(1.0, 1.0), t_mm=-1.0)
    with pytest.raises(ParameterError):
        solve_goal_linear(0.1, 0.0, 0.5)


@settings(max_examples=150)
@given(k_os, ls, fs, st.floats(0.0, 2.0))
def test_generic_reproduces_linear(k_o, l, f, t_mm):
    closed = solve_goal_linear(k_o, l, f, t_mm)
    generic = solve_goal_generic(GoalSpec(f, LinearEfficacy(k_o, l), t_mm))
    assert abs(generic.t_m_star - closed.t_m_star) <= TOL_TIME * max(1.0, closed.t_m_star)


@settings(max_examples=150)
@given(k_os, ls, fs)
def test_balance_residual_at_interior(k_o, l, f):
    s = solve_goal_linear(k_o, l, f)
    if not s.at_boundary:
        assert abs(planning_balance_residual(LinearEfficacy(k_o, l), f, s.t_m_star)) <= 1e-8
        assert abs(s.foc_residual) <= 1e-8


@settings(max_examples=150)
@given(k_os, ls, fs, st.floats(0.0, 1.0))
def test_local_minimality(k_o, l, f, t_mm):
    s = solve_goal_linear(k_o, l, f, t_mm)
    spec = GoalSpec(f, LinearEfficacy(k_o, l), t_mm)
    for t in (s.t_m_star * (1 - 1e-3), s.t_m_star * (1 + 1e-3), s.t_m_star + 1e-3):
        if float(spec.efficacy.value(t)) > 0:
            assert s.t_star <= float(total_time(spec, t))


@settings(max_examples=150)
@given(k_os, ls, fs, fs)
def test_total_time_monotone_in_target(k_o, l, f1, f2):
    lo, hi = sorted((f1, f2))
    assert solve_goal_linear(k_o, l, lo).t_star <= solve_goal_linear(k_o, l, hi).t_star


@settings(max_examples=150)
@given(k_os, ls, fs, st.floats(0.0, 5.0))
def test_meta_cost_is_additive(k_o, l, f, t_mm):
    s0 = solve_goal_linear(k_o, l, f)
    s1 = solve_goal_linear(k_o, l, f, t_mm)
    assert s1.t_m_star == s0.t_m_star
    assert s1.t_star == s0.t_m_star + s0.t_e_star + t_mm


def test_total_time_vectorised():
    spec = GoalSpec(0.9, LinearEfficacy(0.1, 1.0), 0.5)
    t = np.linspace(0.0, 3.0, 7)
    np.testing.assert_array_equal(total_time(spec, t), [total_time(spec, float(x)) for x in t])
