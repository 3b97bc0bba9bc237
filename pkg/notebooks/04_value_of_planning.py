# %% [markdown]
# # What a planning capability is worth over a lifetime
#
# An agent meets a stream of independent problems, each with its own cost
# rate `c` and base rate `k`.  Compare an agent that can plan with one
# that can only choose when to stop.

# %%
import numpy as np

from metapartition import (
    AgentPolicy,
    DiscreteDistribution,
    Environment,
    ProductLogNormal,
    ProductLogUniform,
    value_of_metareasoning,
)

planner = AgentPolicy("reflection_and_planning", "inverse_power", a=1.0, b=1.0, l=1.0)
reflector = AgentPolicy("reflection_only", "inverse_power", a=1.0, b=1.0)

# %%
# Two kinds of problem, met twice a second for 100 seconds.
env = Environment(DiscreteDistribution([(0.01, 0.05), (0.04, 0.5)], [0.5, 0.5]), frequency=2.0, lifetime=100.0)
v = value_of_metareasoning(env, planner, reflector)
print(v.value, v.per_instance)

# %% [markdown]
# ## Continuous populations of problems
#
# Quadrature and sampling should agree to within a few standard errors.

# %%
for dist in (ProductLogUniform((1e-3, 0.1), (0.01, 1.0)), ProductLogNormal(np.log(0.01), 0.7, np.log(0.2), 0.6)):
    env = Environment(dist, frequency=0.5, lifetime=3600.0)
    quad = value_of_metareasoning(env, planner, reflector, order=64)
    mc = value_of_metareasoning(env, planner, reflector, method="monte_carlo", seed=7, samples=100_000)
    print(type(dist).__name__, quad.value, mc.value, "+/-", mc.standard_error)

# %% [markdown]
# ## Harder problems, bigger gains
#
# Shrinking the base rates makes planning pay more.

# %%
for k_hi in (2.0, 0.5, 0.1, 0.02):
    env = Environment(ProductLogUniform((1e-3, 0.1), (k_hi / 100, k_hi)), 1.0, 1.0)
    print(k_hi, value_of_metareasoning(env, planner, reflector).value)
