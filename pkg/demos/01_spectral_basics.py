"""Sine modes, collocation grid and the mode-wise operators.

Run with ``python demos/01_spectral_basics.py``.
"""

import numpy as np

from truncspde import ModeBasis, lq_norm_pow

K = 7
basis = ModeBasis(K)
print("collocation points:", np.round(basis.points, 4))
print("first eigenvalues (nu k^2 pi^2):", np.round(basis.eigenvalues[:3], 4))

# A single mode on the grid is sqrt(2) sin(k pi x).
c = np.zeros(K)
c[1] = 1.0
u = basis.to_grid(c)
print("mode 2 on the grid:", np.round(u, 4))
print("back to modes:     ", np.round(basis.to_spectral(u), 12))

# Parseval: the rectangle rule on the grid reproduces the sum of squares.
rng = np.random.default_rng(0)
c = rng.standard_normal(K)
print(f"sum c_k^2 = {np.sum(c**2):.15f}")
print(f"grid L2^2 = {lq_norm_pow(basis.to_grid(c), 2):.15f}")

# The three linear propagators over one step h.
h = 0.01
num, den = basis.cn_factors(h)
print("\n k   e^{-lam h}   1/(1+lam h)   CN factor")
for k in range(K):
    print(f"{k + 1:2d}   {basis.semigroup_factors(h)[k]:.6f}     {1 / basis.resolvent_denominators(h)[k]:.6f}"
          f"      {num[k] / den[k]:+.6f}")
