# %% [markdown]
# # Mollification
#
# Convolution leaves the step-function class, so this part works on a grid of
# step h in float64 and reports a quadrature tolerance next to each value.

# %%
import math

from predual import Exponents, indicator
from predual.approx import convolve, mollifier, mollifier_convergence, sample

f = indicator([[0, 1]])
rows = mollifier_convergence(f, Exponents(2, 2, 2), [2.0 ** -k for k in range(1, 7)], 1e-3, "box")
print("  eps        err    sqrt(2 eps/3)")
for eps, err in rows:
    print(f"{eps:7.4f}  {err:.6f}  {math.sqrt(2 * eps / 3):.6f}")

# %% [markdown]
# Same experiment with the triangle kernel and a mixed-norm target.

# %%
for eps, err in mollifier_convergence(f, Exponents(3, 6, 4), [0.5, 0.25, 0.125, 0.0625], 1e-3, "triangle"):
    print(f"{eps:7.4f}  {err:.6f}")

# %%
tent = convolve(sample(f, 1e-3), sample(f, 1e-3))
print("peak of chi * chi:", tent.samples.max(), "support length", round(tent.end - tent.origin, 3))
