from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapartition import (
    DomainError,
    Exponential,
    InversePower,
    LinearCost,
    LinearEfficacy,
    ParameterError,
    PartitionedExponential,
    PartitionedInversePower,
    PowerCost,
    TabulatedCost,
    TabulatedEfficacy,
    eval_cost,
    eval_cost_derivative,
    eval_uc,
    eval_uo,
    eval_uo_derivative,
    eval_uo_hessian,
)
from metapartition.oracle import finite_diff

pos = st.floats(0.05, 5.0)
times = st.floats(0.05, 20.0)


def profiles():
    eff = st.builds(LinearEfficacy, st.floats(0.05, 3.0), st.floats(0.0, 2.0))
    return st.one_of(
        st.builds(Exponential, pos),
        st.builds(InversePower, pos, st.floats(0.25, 4.0)),
        st.builds(PartitionedExponential, eff),
        st.builds(PartitionedInversePower, eff, st.floats(0.25, 3.0), st.floats(0.25, 3.0)),
    )


# -- worked values -----------------------------------------------------------


def test_exponential_value():
    assert eval_uo(Exponential(0.1), 0.0, 9.163) == pytest.approx(1 - math.exp(-0.9163), abs=1e-12)
    assert eval_uo(Exponential(0.1), 0.0, 9.163) == pytest.approx(0.600, abs=5e-4)
    assert eval_uo(Exponential(0.1), 0.0, 0.0) == 0.0


def test_inverse_power_value():
    assert eval_uo(InversePower(1.0, 1.0), 0.0, 1.0) == 0.0


def test_first_derivatives():
    assert eval_uo_derivative(Exponential(0.1), 0.0, 0.0) == pytest.approx(0.1)
    assert eval_uo_derivative(InversePower(1.0, 1.0), 0.0, 2.0) == pytest.approx(0.25)
    p = PartitionedInversePower(LinearEfficacy(0.0, 1.0), b=1.0, a=1.0)
    assert eval_uo_derivative(p, 2.0, 2.0, which="wrt_tm") == pytest.approx(0.125)


def test_derivative_rejects_unknown_axis():
    with pytest.raises(ValueError):
        eval_uo_derivative(Exponential(1.0), 0.0, 1.0, which="wrt_t")


def test_cost_values():
    assert eval_cost(LinearCost(0.04), 9.173) == pytest.approx(0.36692, abs=1e-12)
    assert eval_cost(LinearCost(0.3), 0.0) == 0.0
    assert eval_cost(PowerCost(1.0, 2.0), 3.0) == 9.0
    assert eval_cost_derivative(PowerCost(1.0, 2.0), 3.0) == 6.0


def test_comprehensive_value_examples():
    assert eval_uc(Exponential(0.1), LinearCost(0.04), 0.01, 0.0, 9.163) == pytest.approx(0.233, abs=5e-4)
    assert eval_uc(Exponential(0.1), LinearCost(0.08), 0.01, 0.0, 2.231) == pytest.approx(0.021, abs=5e-4)
    assert eval_uc(Exponential(0.7), PowerCost(2.0, 3.0), 0.0, 0.0, 0.0) == 0.0


# -- domains and validation --------------------------------------------------


def test_inverse_power_undefined_at_zero():
    with pytest.raises(DomainError):
        eval_uo(InversePower(1.0, 1.0), 0.0, 0.0)
    with pytest.raises(DomainError):
        eval_uo(PartitionedInversePower(LinearEfficacy(1.0, 1.0), 1.0, 1.0), 0.0, 0.0)


def test_partitioned_inverse_power_needs_positive_rate():
    with pytest.raises(DomainError):
        eval_uo(PartitionedInversePower(LinearEfficacy(0.0, 1.0), 1.0, 1.0), 0.0, 1.0)


def test_negative_times_rejected():
    with pytest.raises(DomainError):
        eval_uo(Exponential(1.0), 0.0, -1.0)
    with pytest.raises(DomainError):
        eval_uo(PartitionedExponential(LinearEfficacy(1.0, 1.0)), -0.5, 1.0)
    with pytest.raises(DomainError):
        eval_cost(LinearCost(1.0), -1e-9)


@pytest.mark.parametrize(
    "build",
    [
        lambda: Exponential(0.0),
        lambda: InversePower(1.0, -1.0),
        lambda: LinearCost(-0.1),
        lambda: PowerCost(1.0, 0.5),
        lambda: LinearEfficacy(-1.0, 1.0),
        lambda: PartitionedInversePower(LinearEfficacy(1.0, 1.0), b=0.0, a=1.0),
        lambda: TabulatedCost([(0.0, 0.0), (1.0, 0.0)]),
        lambda: TabulatedCost([(0.0, 0.1), (1.0, 1.0)]),
        lambda: TabulatedCost([(1.0, 0.0), (2.0, 1.0)]),
        lambda: TabulatedEfficacy([(0.0, 1.0), (1.0, 0.5)]),
        lambda: TabulatedEfficacy([(0.0, 1.0)]),
        lambda: Exponential(float("nan")),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(ParameterError):
        build()


# -- tabulated families ------------------------------------------------------


def test_tabulated_cost_right_slope_and_extrapolation():
    cost = TabulatedCost([(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)])
    assert eval_cost(cost, 0.5) == 0.5
    assert eval_cost_derivative(cost, 1.0) == 2.0  # right slope at the knot
    assert eval_cost_derivative(cost, 0.999) == 1.0
    assert eval_cost(cost, 4.0) == 7.0
    assert eval_cost_derivative(cost, 10.0) == 2.0


def test_tabulated_efficacy_matches_linear_on_knots():
    grid = np.arange(0.0, 5.0 + 1e-9, 0.5)
    tab = TabulatedEfficacy([(t, 0.2 + 3.0 * t) for t in grid])
    lin = LinearEfficacy(0.2, 3.0)
    x = np.linspace(0.0, 7.0, 57)
    np.testing.assert_allclose(tab.value(x), lin.value(x), rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(tab.derivative(x), 3.0, rtol=1e-12)
    assert tab.k_o == pytest.approx(0.2)


def test_vector_evaluation_matches_scalar():
    p = PartitionedInversePower(LinearEfficacy(0.5, 1.5), b=2.0, a=0.7)
    te = np.linspace(0.1, 5.0, 9)
    vec = eval_uo(p, 1.3, te)
    assert vec.shape == te.shape
    for x, v in zip(te, vec):
        assert eval_uo(p, 1.3, float(x)) == v


# -- properties ---------------------------------------------------------------


@settings(max_examples=150)
@given(profiles(), st.floats(0.0, 10.0), times, times)
def test_monotone_in_execution_time(profile, t_m, t1, t2):
    lo, hi = sorted((t1, t2))
    assert eval_uo(profile, t_m, lo) <= eval_uo(profile, t_m, hi)


@settings(max_examples=150)
@given(profiles(), st.floats(0.0, 10.0), st.floats(0.0, 10.0), times)
def test_monotone_in_planning_time(profile, m1, m2, t_e):
    lo, hi = sorted((m1, m2))
    assert eval_uo(profile, lo, t_e) <= eval_uo(profile, hi, t_e)


@settings(max_examples=100)
@given(profiles(), st.floats(0.0, 5.0), times)
def test_value_never_exceeds_one(profile, t_m, t_e):
    # 1 - exp(-40) already rounds to 1.0, so the strict bound is not representable.
    assert eval_uo(profile, t_m, t_e) <= 1.0


def test_converges_to_complete_value():
    for p in (Exponential(0.3), InversePower(2.0, 1.5), PartitionedInversePower(LinearEfficacy(1.0, 1.0), 1.0, 1.0)):
        assert eval_uo(p, 1.0, 1e8) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=150)
@given(
    profiles(),
    st.one_of(st.builds(LinearCost, pos), st.builds(PowerCost, pos, st.floats(1.0, 3.0))),
    st.floats(0.0, 2.0),
    st.floats(0.0, 5.0),
    times,
)
def test_additive_decomposition(profile, cost, t_mm, t_m, t_e):
    uc = eval_uc(profile, cost, t_mm, t_m, t_e)
    assert uc + eval_cost(cost, t_m + t_e + t_mm) == pytest.approx(eval_uo(profile, t_m, t_e), rel=0, abs=4e-16 * max(1.0, abs(uc)) * 16)


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


@settings(max_examples=200)
@given(profiles(), st.floats(0.2, 5.0), st.floats(0.5, 5.0))
def test_first_derivatives_match_finite_differences(profile, t_m, t_e):
    d_te = eval_uo_derivative(profile, t_m, t_e, "wrt_te")
    fd_te = finite_diff(lambda y: eval_uo(profile, t_m, y), t_e, 1, 1e-5)
    assert _rel(d_te, fd_te) <= 1e-6
    d_tm = eval_uo_derivative(profile, t_m, t_e, "wrt_tm")
    fd_tm = finite_diff(lambda x: eval_uo(profile, x, t_e), t_m, 1, 1e-5)
    assert _rel(d_tm, fd_tm) <= 1e-6


@settings(max_examples=200)
@given(profiles(), st.floats(0.2, 5.0), st.floats(0.5, 5.0))
def test_second_derivatives_match_finite_differences(profile, t_m, t_e):
    H = eval_uo_hessian(profile, t_m, t_e)
    h = 1e-4
    fd_ee = finite_diff(lambda y: eval_uo_derivative(profile, t_m, y, "wrt_te"), t_e, 1, h)
    fd_mm = finite_diff(lambda x: eval_uo_derivative(profile, x, t_e, "wrt_tm"), t_m, 1, h)
    fd_me = finite_diff(lambda y: eval_uo_derivative(profile, t_m, y, "wrt_tm"), t_e, 1, h)
    assert _rel(H[1, 1], fd_ee) <= 1e-6
    assert _rel(H[0, 0], fd_mm) <= 1e-6
    assert _rel(H[0, 1], fd_me) <= 1e-6


@settings(max_examples=100)
@given(st.floats(0.05, 3.0), st.floats(1.0, 3.0), st.floats(0.1, 10.0))
def test_cost_derivatives_match_finite_differences(c, p, t):
    cost = PowerCost(c, p)
    assert _rel(eval_cost_derivative(cost, t), finite_diff(lambda x: eval_cost(cost, x), t, 1, 1e-5)) <= 1e-6
    fd2 = finite_diff(lambda x: eval_cost_derivative(cost, x), t, 1, 1e-5)
    assert _rel(float(cost.second_derivative(t)), fd2) <= 1e-6


def test_frozen_models_are_hashable():
    assert hash(Exponential(0.1)) == hash(Exponential(0.1))
    with pytest.raises(Exception):
        Exponential(0.1).k = 2.0
