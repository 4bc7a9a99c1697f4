# %% [markdown]
# # The weighted scale curve and the Fofana norm
#
# `Phi(rho) = rho^(d(1/alpha - 1/q)) * _rho||f||_(q,p)`; the norm is its
# supremum over rho > 0.  The search evaluates a geometric grid, refines the
# local maxima and flags the result exact only when an attainment argument
# applies.

# %%
from fractions import Fraction as Q

from predual import Exponents, ScaleGrid, fofana_norm, indicator, phi_curve

e = Exponents(1, "inf", 2)
f = indicator([[0, 1]])
for pt in phi_curve(f, e, ScaleGrid(Q(1, 8), 8, 4, (Q(1),))):
    bar = "#" * int(40 * float(pt.phi))
    print(f"{float(pt.rho):8.4f}  {float(pt.phi):.6f}  {bar}")

# %% [markdown]
# The unit interval peaks at rho = 1; its double peaks at rho = 2 with value
# sqrt(2), as dilation invariance predicts.

# %%
for g in (indicator([[0, 1]]), indicator([[0, 2]])):
    est = fofana_norm(g, e)
    print(f"{g}:  norm {float(est.value):.12f}  at rho = {est.best_witness}  exact = {est.exact}"
          f"  ({est.evaluated_points} scales evaluated)")

# %% [markdown]
# A function with no attainment argument gets a lower bound only.

# %%
from predual.corefn import Box, disjointify

h = disjointify([(3, Box.from_intervals([[Q(1, 3), Q(1, 2)]])), (1, Box.from_intervals([[2, 7]]))])
est = fofana_norm(h, Exponents(Q(3, 2), 6, 3))
print(f"lower bound {float(est.value):.12f} at rho = {est.best_witness}, exact = {est.exact}")
