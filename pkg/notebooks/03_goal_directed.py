# %% [markdown]
# # Reaching a fixed quality as fast as possible
#
# Here the target is a fraction `f` of the complete value and the question
# is how to minimise the total time `t_m + t_e + t_mm`.  After `t_m` of
# planning, execution needs `-ln(1 - f) / K(t_m)` seconds.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from pathlib import Path

from metapartition import GoalSpec, LinearEfficacy, alternate_planning_time, solve_goal_linear, sweep, total_time
from metapartition.oracle import grid_min_1d

FIGURES = Path(__file__).resolve().parent / "figures"
FIGURES.mkdir(exist_ok=True)

# %%
print(solve_goal_linear(k_o=0.1, l=1.0, f=0.9))

# %% [markdown]
# ## Two closed forms, one answer
#
# Setting the derivative of total time to zero gives `K(t_m)**2 = -l ln(1-f)`.
# A second printed form carries extra `k_o**2` terms; the two coincide at
# `l = 1` but drift apart elsewhere.  A brute-force minimisation settles it.

# %%
spec = GoalSpec(0.9, LinearEfficacy(0.1, 4.0))
oracle = grid_min_1d(lambda t: total_time(spec, t))
print("grid minimum     ", oracle.argument, "+/-", oracle.resolution)
print("balance condition", solve_goal_linear(0.1, 4.0, 0.9).t_m_star)
print("variant form     ", alternate_planning_time(0.1, 4.0, 0.9))

# %% [markdown]
# ## Time budgets as the target rises

# %%
fs = np.linspace(0.01, 0.99, 99)
rows = sweep(lambda f: solve_goal_linear(0.1, 1.0, f), fs)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(fs, [r.t_star for r in rows], label="total")
ax.plot(fs, [r.t_m_star for r in rows], label="planning")
ax.plot(fs, [r.t_e_star for r in rows], label="execution")
ax.set_xlabel("target fraction f")
ax.set_ylabel("time (s)")
ax.legend()
fig.savefig(FIGURES / "goal_sweep.png", dpi=120, bbox_inches="tight")
