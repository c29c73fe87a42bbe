# %% [markdown]
# # Why unimodularity matters
#
# Twisting df by g(f)/rho^2 (x2 dx1 - x1 dx2) keeps the dual form
# integrable but kills unimodularity.  The Hamiltonian field of x3 then
# rotates at unit rate while f creeps down along f' = -g(f): orbits spiral
# into the cone instead of closing up, which a linear model cannot do.

# %%
import numpy as np

from nambu_lin.frontend import serialize
from nambu_lin.holonomy import CounterexampleSpec, integrate_trajectory, linear_model_orbit, spiral_metrics, symbolic_field

print("X =", serialize(symbolic_field(3), ["x1", "x2", "x3", "G"]))

tr = integrate_trajectory(CounterexampleSpec(), [1.0, 0.0, 0.0], 50.0)
m = spiral_metrics(tr)
print(f"theta slope {m.theta_rate:.9f}, f {tr.f_values[0]:.4f} -> {tr.f_values[-1]:.4f}")
print("strictly decreasing:", m.f_strictly_decreasing, "| gap to f' = -g(f):", f"{m.f_ode_residual:.1e}")

# %%
lin = linear_model_orbit([1.0, 0.0, 0.0], 100.0)
print("linear model f drift over T=100:", f"{np.max(np.abs(lin.f_values - lin.f_values[0])):.1e}")
