# %% [markdown]
# # Amalgam norms of step functions
#
# A step function here is a finite sum of values on disjoint boxes with
# rational corners.  Every norm below is computed exactly up to 113-bit
# rounding; nothing is sampled.

# %%
from fractions import Fraction as Q

from predual import Exponents, amalgam_norm, dilate, indicator, lebesgue_norm
from predual.corefn import Box, disjointify, rational_power
from predual.io import format_real

f = indicator([[0, 3]])
for rho in (Q(1, 2), 1, 2, 3, 10):
    print(f"rho = {str(rho):>4}   _rho||chi[0,3)||_(2,4) = {format_real(amalgam_norm(f, 2, 4, rho))[:18]}")

# %% [markdown]
# Overlapping boxes are resolved into a canonical disjoint form, so sums of
# indicators behave as functions.

# %%
g = disjointify([(1, Box.from_intervals([[0, 2]])), (1, Box.from_intervals([[1, 3]]))])
print(g)

# %% [markdown]
# The dilation `St^(a)_r f = r^(-d/a) f(./r)` preserves the L^a norm and
# moves amalgam norms between lattice scales:
# `||St^(a)_r f||_(q,p) = r^(-d(1/a - 1/q)) * _(1/r)||f||_(q,p)`.

# %%
h = disjointify([(2, Box.from_intervals([[0, Q(1, 2)]])), (-1, Box.from_intervals([[Q(1, 2), 3]]))])
q, p, a, r = 2, 4, 3, Q(5, 2)
lhs = amalgam_norm(dilate(h, r, a), q, p, 1)
rhs = rational_power(r, -(Q(1, a) - Q(1, q))) * amalgam_norm(h, q, p, 1 / r)
print("scaled norm  ", format_real(lhs)[:20])
print("identity     ", format_real(rhs)[:20])
print("L^3 before/after", format_real(lebesgue_norm(h, 3))[:20], format_real(lebesgue_norm(dilate(h, r, 3), 3))[:20])
