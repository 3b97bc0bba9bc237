# %% [markdown]
# # Splitting time between planning and execution
#
# Planning for `t_m` seconds raises the refinement rate of the execution
# phase to `K(t_m) = k_o + l t_m`.  With the inverse-power profile
# `1 - 1/(K^b t_e^a)` and linear cost the optimal split has a closed form.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from pathlib import Path

from metapartition import (
    LinearCost,
    LinearEfficacy,
    PartitionedExponential,
    PartitionedInversePower,
    PowerCost,
    check_hessian,
    partition_slices,
    solve_partition_closed_form,
    solve_partition_fixed_point,
    solve_partition_grid,
)
from metapartition.models import uc_raw

FIGURES = Path(__file__).resolve().parent / "figures"
FIGURES.mkdir(exist_ok=True)

# %%
sol = solve_partition_closed_form(a=1, b=1, k_o=0.0, l=1.0, c=0.01)
print(sol)  # both phases get 100**(1/3) seconds

profile = PartitionedInversePower(LinearEfficacy(0.0, 1.0), b=1.0, a=1.0)
h = check_hessian(profile, LinearCost(0.01), 0.0, sol.t_m_star, sol.t_e_star)
print("eigenvalues of the Hessian:", h.eigenvalues)

# %% [markdown]
# ## Slices through the optimum

# %%
planning, execution = partition_slices(profile, LinearCost(0.01), 0.0, sol.t_m_star, sol.t_e_star, points=301, span=3.0)
fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
left.plot([r["t_m"] for r in planning], [r["u_c"] for r in planning])
left.axvline(sol.t_m_star, color="grey", ls=":")
left.set_xlabel("planning time (execution fixed at its optimum)")
right.plot([r["t_e"] for r in execution], [r["u_c"] for r in execution])
right.axvline(sol.t_e_star, color="grey", ls=":")
right.set_xlabel("execution time (planning fixed at its optimum)")
for ax in (left, right):
    ax.set_ylim(0.5, 0.9)
fig.savefig(FIGURES / "partition_slices.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# ## The whole surface

# %%
tm, te = np.meshgrid(np.linspace(0.05, 15, 200), np.linspace(0.05, 15, 200), indexing="ij")
surface = uc_raw(profile, LinearCost(0.01), 0.0, tm, te)
fig, ax = plt.subplots(figsize=(5, 4))
cs = ax.contourf(tm, te, np.clip(surface, 0.5, None), levels=30)
ax.plot(sol.t_m_star, sol.t_e_star, "w+", ms=12)
ax.set_xlabel("planning time")
ax.set_ylabel("execution time")
fig.colorbar(cs)
fig.savefig(FIGURES / "partition_surface.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# ## A fast base rate makes planning pointless
#
# With `k_o = 10` the rate that balances planning against its cost is
# already exceeded at `t_m = 0`, so the answer is to execute straight away.

# %%
print(solve_partition_closed_form(1, 1, k_o=10.0, l=1.0, c=0.01))

# %% [markdown]
# ## Other efficacies and costs
#
# For a convex cost the fixed-point search finds the split; for an
# exponential execution profile there is no coupling formula and the 2-D
# grid solver takes over.

# %%
print(solve_partition_fixed_point(1.0, 2.0, LinearEfficacy(0.3, 0.7), PowerCost(0.005, 1.5), 0.1))
print(solve_partition_grid(PartitionedExponential(LinearEfficacy(0.05, 0.05)), LinearCost(0.04)))
