# %% [markdown]
# # Recognising Nambu structures
#
# A multivector P of order q is Nambu exactly when its dual form
# iota_P mu is decomposable and integrable.  For bivectors in dimension 3
# this must agree with the Jacobi identity [P, P] = 0.

# %%
from nambu_lin.frontend import parse, serialize
from nambu_lin.nambu import (
    SL2,
    NambuCandidate,
    classify_3d_algebra,
    dual_form,
    is_nambu,
    is_unimodular,
    jacobi_residual,
    lie_poisson,
    linear_type1,
    nondeg_signature,
    type1_specs,
)

P = parse("e2^e3 + x1*x2*e1^e2", "multivector", dim=3)
c = NambuCandidate(P)
v = is_nambu(c)
print("dual form:", serialize(dual_form(c)))
print("is_nambu:", v.ok, "| witness:", v.witness[1], serialize(v.witness[2]))
print("[P, P] =", serialize(jacobi_residual(c)))

# %% [markdown]
# Every linear Type 1 structure on the grid n <= 5 passes.

# %%
specs = list(type1_specs(5))
print(len(specs), "specs, all Nambu:", all(is_nambu(NambuCandidate(linear_type1(s))) for s in specs))

# %% [markdown]
# The Lie-Poisson structure of sl(2) is unimodular for the standard volume,
# its potential is a quadratic form of signature (2,1), and the Killing form
# has the same inertia.

# %%
pi = lie_poisson(SL2)
print("Pi_sl2 =", serialize(pi))
print("unimodular:", is_unimodular(NambuCandidate(pi)).ok)
data = nondeg_signature(pi)
print("potential:", serialize(data.F), "signature", data.signature)
print("algebra:", classify_3d_algebra(SL2))
