# %% [markdown]
# # Morrey norms and ball atoms
#
# With p = inf and lambda = dq/alpha the Fofana space is the Morrey space.
# Atoms supported in balls convert into decomposition terms with the
# constant `C = |B(0,1)|^(1/alpha - 1/q)`.

# %%
from fractions import Fraction as Q

import mpmath

from predual import Exponents, indicator, morrey_norm, validate, zorko_to_h
from predual.corefn import rational_power, reciprocal
from predual.norms import lebesgue_norm

est = morrey_norm(indicator([[0, 1]]), 1, Q(1, 2))
print("Morrey norm of chi[0,1), q=1, lambda=1/2:", float(est.value), est.best_witness)

# %%
e = Exponents(2, "inf", 4)
a = indicator([[-1, 1]]).scale(mpmath.mpf(2) ** (-0.75))
dec = zorko_to_h([(1, a, 0, 1)], e)
print("worked atom: converted atom norm", float(dec.atom_norms()[0]))

# %% [markdown]
# For q close to 1 the factor 2^d is not enough: a constant atom on a ball
# that straddles three unit cells produces an atom of norm above 1.

# %%
for q in (Q(11, 10), Q(3, 2), Q(8, 5), 2, 3):
    ex = Exponents(q, "inf", 4)
    ball = indicator([[Q(-1, 2), Q(3, 2)]])
    bound = rational_power(Q(2), reciprocal(ex.alpha) - reciprocal(ex.q))
    atom = ball.scale(bound / lebesgue_norm(ball, ex.q_conj))
    d = zorko_to_h([(1, atom, Q(1, 2), 1)], ex)
    print(f"q = {str(q):>5}: atom norm {float(d.atom_norms()[0]):.4f}  valid = {validate(d).valid}")
