# %% [markdown]
# # Bracketing the pre-dual norm
#
# `||f||_H` is the infimum of `sum |c_n|` over decompositions
# `f = sum c_n St^(alpha')_(rho_n) f_n` with atoms of unit (q', p') norm.
# Any explicit decomposition gives an upper bound; any witness g gives the
# lower bound `|<f, g>| / ||g||_(q,p,alpha)`.

# %%
from fractions import Fraction as Q

from predual import (Exponents, hnorm_sandwich, indicator, pairing_bound_check,
                     scale_optimized_bound, trivial_decomposition, validate)
from predual.corefn import Box, disjointify

e = Exponents(2, 4, 3)
f = indicator([[0, 2]])
print("trivial upper bound  ", float(trivial_decomposition(f, e).cost))
dec, cost = scale_optimized_bound(f, e)
print("scale-optimised bound", float(cost), "using rho =", [str(r) for _, r, _ in dec.terms])
print("atoms valid:", validate(dec).valid)

# %%
res = hnorm_sandwich(f, e)
print(f"{float(res.lower):.12f} <= ||chi[0,2)||_H <= {float(res.upper):.12f}   certified = {res.certified_lower}")

# %% [markdown]
# On a less symmetric function the two bounds separate; the gap is what the
# search could not close.

# %%
g = disjointify([(2, Box.from_intervals([[0, Q(1, 2)]])), (-1, Box.from_intervals([[1, 4]]))])
for exps in (Exponents(2, 4, 3), Exponents(1, "inf", 2), Exponents(Q(3, 2), 6, 4)):
    r = hnorm_sandwich(g, exps)
    print(f"{exps}:  [{float(r.lower):.6f}, {float(r.upper):.6f}]  certified value {float(r.certified_value):.6f}")

# %% [markdown]
# Each term of a decomposition obeys the pairing chain
# `|<St f_n, g>| = |<f_n, St^(alpha)_(1/rho) g>| <= ||f_n|| ||St g||`.

# %%
rep = pairing_bound_check(scale_optimized_bound(g, e)[0], indicator([[0, 3]]))
print("chain holds:", rep.ok, " total", float(rep.total_lhs), "<=", float(rep.total_rhs))
