# %% [markdown]
# # Exact exterior calculus on polynomial coefficients
#
# Forms and multivectors carry exact rational polynomial coefficients, so
# identities come out as literal zeros rather than small floats.

# %%
from nambu_lin.exterior import MultiVector, d, exact_form, interior, lie_derivative, schouten, euler_field, wedge
from nambu_lin.frontend import parse, serialize

w = parse("x2*x3*dx1 + x1^2*dx2", "form", dim=3)
print("w      =", serialize(w))
print("dw     =", serialize(d(w)))
print("d(dw)  =", serialize(d(d(w))))

# %% [markdown]
# Interior products contract the leading slots.  For the volume form,
# contracting with a bivector leaves a 1-form.

# %%
vol = parse("dx1^dx2^dx3", "form", dim=3)
P = parse("x1*e2^e3 - x2*e1^e3 + x3*e1^e2", "multivector", dim=3)
print("iota_P vol =", serialize(interior(P, vol)))

# %% [markdown]
# The Schouten bracket on vector fields is the Lie bracket, and the Euler
# field scales a linear bivector by (coefficient degree - order) = -1.

# %%
X = parse("x2*e1", "multivector", dim=3)
Y = parse("x1*e2", "multivector", dim=3)
print("[X, Y]      =", serialize(schouten(X, Y)))
print("L_E P       =", serialize(lie_derivative(euler_field(3), P)))
print("[P, P]      =", serialize(schouten(P, P)))
