from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapartition import (
    AgentPolicy,
    DiscreteDistribution,
    Environment,
    ParameterError,
    ProblemInstance,
    ProductLogNormal,
    ProductLogUniform,
    SamplingError,
    instance_optimal_utility,
    optimal_utilities,
    solve_partition_closed_form,
    solve_stop_inverse_power,
    value_of_metareasoning,
)

REFLECT_EXP = AgentPolicy("reflection_only", "exponential", t_mm=0.01)
PLAN_EXP = AgentPolicy("reflection_and_planning", "exponential", l=0.05, t_mm=0.01)
REFLECT_IP = AgentPolicy("reflection_only", "inverse_power", a=1.0, b=1.0)
PLAN_IP = AgentPolicy("reflection_and_planning", "inverse_power", a=1.0, b=1.0, l=1.0)


def test_reflection_instance_value():
    u = instance_optimal_utility(REFLECT_EXP, ProblemInstance(0.04, 0.1))
    assert u == pytest.approx(0.233, abs=5e-4)


def test_negligible_planning_matches_reflection():
    inst = ProblemInstance(0.04, 0.1)
    plan = AgentPolicy("reflection_and_planning", "exponential", l=1e-12, t_mm=0.01)
    assert instance_optimal_utility(plan, inst) == pytest.approx(instance_optimal_utility(REFLECT_EXP, inst), abs=1e-9)
    plan_ip = AgentPolicy("reflection_and_planning", "inverse_power", l=1e-12)
    assert instance_optimal_utility(plan_ip, inst) == pytest.approx(instance_optimal_utility(REFLECT_IP, inst), abs=1e-9)


def test_inverse_power_planning_instance():
    u = instance_optimal_utility(PLAN_IP, ProblemInstance(0.01, 1e-300))
    assert u == pytest.approx(0.8607, abs=1e-4)


def test_object_level_switch():
    inst = ProblemInstance(0.04, 0.1)
    uo = instance_optimal_utility(REFLECT_EXP, inst, utility="object")
    assert uo == pytest.approx(1 - math.exp(-math.log(2.5)), abs=1e-12)
    with pytest.raises(ParameterError):
        instance_optimal_utility(REFLECT_EXP, inst, utility="gross")


@settings(max_examples=60)
@given(
    st.lists(st.tuples(st.floats(1e-3, 0.5), st.floats(1e-3, 2.0)), min_size=1, max_size=20),
    st.sampled_from([REFLECT_IP, PLAN_IP, REFLECT_EXP, AgentPolicy("reflection_and_planning", "inverse_power", a=2.0, b=0.5, l=0.3, t_mm=0.2)]),
    st.sampled_from(["comprehensive", "object"]),
)
def test_vectorised_matches_per_instance(pairs, policy, utility):
    c = np.array([p[0] for p in pairs])
    k = np.array([p[1] for p in pairs])
    vec = optimal_utilities(policy, c, k, utility)
    one = [instance_optimal_utility(policy, ProblemInstance(ci, ki), utility) for ci, ki in pairs]
    np.testing.assert_allclose(vec, one, rtol=1e-12, atol=1e-12)


def test_identical_agents_give_zero():
    env = Environment(ProductLogUniform((1e-3, 0.1), (0.01, 1.0)), 1.0, 10.0)
    assert value_of_metareasoning(env, PLAN_IP, PLAN_IP).value == 0.0
    assert value_of_metareasoning(env, PLAN_IP, PLAN_IP, method="monte_carlo", seed=1, samples=100).value == 0.0


def test_single_instance_weak_dominance():
    env = Environment(DiscreteDistribution([(0.04, 0.1)], [1.0]), 1.0, 1.0)
    v = value_of_metareasoning(env, PLAN_EXP, REFLECT_EXP)
    inst = ProblemInstance(0.04, 0.1)
    exact = instance_optimal_utility(PLAN_EXP, inst) - instance_optimal_utility(REFLECT_EXP, inst)
    assert v.value == pytest.approx(exact, abs=1e-15)
    assert v.value >= 0


def test_two_point_hand_expansion():
    inst = [ProblemInstance(0.01, 0.05), ProblemInstance(0.04, 0.5)]
    env = Environment(DiscreteDistribution(inst, [0.3, 0.7]), 2.0, 100.0)
    v = value_of_metareasoning(env, PLAN_IP, REFLECT_IP)
    gains = [
        solve_partition_closed_form(1, 1, i.k, 1.0, i.c).u_c_star - solve_stop_inverse_power(i.k, 1, i.c).u_c_star
        for i in inst
    ]
    assert v.value == pytest.approx(200.0 * (0.3 * gains[0] + 0.7 * gains[1]), rel=1e-12)


def test_monte_carlo_determinism_and_error():
    env = Environment(ProductLogNormal(-4.0, 0.5, -1.0, 0.5), 1.0, 1.0)
    a = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", seed=11, samples=5000)
    b = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", seed=11, samples=5000)
    assert a.value == b.value and a.standard_error == b.standard_error
    assert a.standard_error > 0 and a.samples == 5000


def test_discrete_monte_carlo_close_to_exact():
    env = Environment(DiscreteDistribution([(0.01, 0.05), (0.04, 0.5)], [0.5, 0.5]), 1.0, 1.0)
    exact = value_of_metareasoning(env, PLAN_IP, REFLECT_IP).value
    mc = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", seed=3, samples=20000)
    assert abs(mc.value - exact) <= 4 * mc.standard_error


@pytest.mark.parametrize(
    "dist",
    [ProductLogUniform((1e-3, 0.1), (0.01, 1.0)), ProductLogNormal(math.log(0.01), 0.7, math.log(0.2), 0.6)],
)
def test_monte_carlo_converges_to_quadrature(dist):
    env = Environment(dist, 1.0, 1.0)
    quad = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, order=64)
    mc = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", seed=2024, samples=100_000)
    assert abs(mc.value - quad.value) <= 4 * mc.standard_error


def test_quadrature_converges_with_order():
    env = Environment(ProductLogUniform((1e-3, 0.1), (0.01, 1.0)), 1.0, 1.0)
    v32 = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, order=32).value
    v96 = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, order=96).value
    assert v32 == pytest.approx(v96, rel=1e-4)


def test_sampling_error_on_degenerate_draws():
    env = Environment(ProductLogNormal(0.0, 1.0, -800.0, 0.0), 1.0, 1.0)
    with pytest.raises(SamplingError):
        value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", seed=0, samples=10)


@pytest.mark.parametrize(
    "build",
    [
        lambda: ProblemInstance(0.0, 1.0),
        lambda: DiscreteDistribution([(0.1, 0.1)], [0.9]),
        lambda: DiscreteDistribution([(0.1, 0.1), (0.2, 0.2)], [1.0]),
        lambda: ProductLogUniform((0.0, 1.0), (0.1, 1.0)),
        lambda: ProductLogNormal(0.0, -1.0, 0.0, 1.0),
        lambda: Environment(DiscreteDistribution([(0.1, 0.1)], [1.0]), 0.0, 1.0),
        lambda: AgentPolicy("reflection_and_planning", "exponential", l=0.0),
        lambda: AgentPolicy("sometimes", "exponential"),
        lambda: AgentPolicy("reflection_only", "linear"),
    ],
)
def test_validation(build):
    with pytest.raises(ParameterError):
        build()


def test_unknown_method():
    env = Environment(DiscreteDistribution([(0.1, 0.1)], [1.0]), 1.0, 1.0)
    with pytest.raises(ParameterError):
        value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="simpson")
    with pytest.raises(ParameterError):
        value_of_metareasoning(env, PLAN_IP, REFLECT_IP, method="monte_carlo", samples=1)


def test_object_level_reading_differs():
    env = Environment(ProductLogUniform((1e-3, 0.1), (0.01, 1.0)), 1.0, 1.0)
    comp = value_of_metareasoning(env, PLAN_IP, REFLECT_IP).value
    obj = value_of_metareasoning(env, PLAN_IP, REFLECT_IP, utility="object").value
    assert comp != obj
