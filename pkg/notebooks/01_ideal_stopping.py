# %% [markdown]
# # When to stop refining
#
# An anytime computation improves its result the longer it runs, and every
# second it runs costs something.  With an exponential performance profile
# `u_o(t) = 1 - exp(-k t)` and a linear delay cost `c t`, the best stopping
# time is where marginal value falls to marginal cost.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from pathlib import Path

from metapartition import (
    Exponential,
    InversePower,
    LinearCost,
    PowerCost,
    solve_stop_exponential,
    solve_stop_generic,
    solve_stop_inverse_power,
    sweep,
    value_curve,
)

FIGURES = Path(__file__).resolve().parent / "figures"
FIGURES.mkdir(exist_ok=True)

# %%
# The worked instance: k = 0.1 per second, c = 0.04 per second, and 0.01 s
# spent deciding all this.
sol = solve_stop_exponential(k=0.1, c=0.04, t_mm=0.01)
print(sol)

# %%
# Doubling the cost of delay shortens the run and lowers the payoff.
print(solve_stop_exponential(k=0.1, c=0.08, t_mm=0.01))

# %% [markdown]
# ## Value, cost and their difference along the run

# %%
rows = value_curve(Exponential(0.1), LinearCost(0.04), 0.01, np.linspace(0, 40, 401))
t = np.array([r["t"] for r in rows])
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(t, [r["u_o"] for r in rows], label="object-level value")
ax.plot(t, [r["cost"] for r in rows], label="delay cost")
ax.plot(t, [r["u_c"] for r in rows], label="comprehensive value")
ax.axvline(sol.t_star, color="grey", ls=":")
ax.set_xlabel("time (s)")
ax.legend()
fig.savefig(FIGURES / "value_curve.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# ## Sensitivity to the cost of delay
#
# Sweep c for both profile families.  Higher cost always means an earlier
# stop and a smaller payoff.

# %%
costs = np.geomspace(0.005, 0.2, 40)
exp_rows = sweep(lambda c: solve_stop_exponential(0.1, c, 0.01), costs)
ip_rows = sweep(lambda c: solve_stop_inverse_power(1.0, 1.0, c, 0.01), costs)

fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
left.plot(costs, [r.t_e_star for r in exp_rows], label="exponential")
left.plot(costs, [r.t_e_star for r in ip_rows], label="inverse power")
left.set_xscale("log")
left.set_xlabel("cost rate c")
left.set_ylabel("stopping time")
right.plot(costs, [r.u_c_star for r in exp_rows])
right.plot(costs, [r.u_c_star for r in ip_rows])
right.set_xscale("log")
right.set_xlabel("cost rate c")
right.set_ylabel("optimal comprehensive value")
left.legend()
fig.savefig(FIGURES / "cost_sweep.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# ## Beyond the closed forms
#
# With a convex cost there is no formula, but the marginal condition still
# pins the answer down.  For `1 - 1/t` against `t**2` it is `(1/2)**(1/3)`.

# %%
generic = solve_stop_generic(InversePower(1.0, 1.0), PowerCost(1.0, 2.0))
print(generic.t_e_star, 0.5 ** (1 / 3))
