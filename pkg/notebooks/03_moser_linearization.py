# %% [markdown]
# # Moser path to the linear model
#
# With Pi = k(f) Pi_l the family Pi_t = (1 + t(k(f) - 1)) Pi_l is pushed to
# Pi_l by the flow of r_t(f) E.  The coefficient is found by solving the
# Moser equation symbolically; the residual is then an exact polynomial.

# %%
from nambu_lin.frontend import parse_univariate, serialize
from nambu_lin.linalg import Signature
from nambu_lin.linearize import MoserSpec, derive_rt, flow_map, moser_residual, printed_rt, pullback_residual, sample_grid

for n in (3, 4, 5):
    spec = MoserSpec(n, Signature(n, 0), parse_univariate("1+u"))
    r = derive_rt(spec).r
    print(n, "r_t =", f"({serialize(r.num, ['f', 't'])}) / ({serialize(r.den, ['f', 't'])})",
          "| residual zero:", moser_residual(spec, r).is_zero())

# %% [markdown]
# The denominator with (1 + t(1 - k)) does not solve the equation once k is
# non-constant; it leaves a nonzero residual.

# %%
spec = MoserSpec(3, Signature(3, 0), parse_univariate("1+u"))
print("other sign:", serialize(moser_residual(spec, printed_rt(spec)), ["x1", "x2", "x3", "t"]))

# %% [markdown]
# Numerically, the time-one map pulls k(f) Pi_l back to Pi_l up to
# integration error on a grid around the origin.

# %%
for sig in [(3, 0), (2, 1)]:
    spec = MoserSpec(3, sig, parse_univariate("1 - f/2"))
    worst = max(pullback_residual(spec, x) for x in sample_grid(3, 0.2, 3))
    print(sig, "max pullback residual", f"{worst:.2e}", "| lambda at (0.2,0.2,0.2):",
          flow_map(spec, [0.2, 0.2, 0.2]).lam)
