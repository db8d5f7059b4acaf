"""Clamped cubic B-splines and the natural spline fit.

Builds a clamped knot vector, tabulates the basis, checks that it sums to
one, then fits a natural cubic spline to samples of ``sin`` on Chebyshev
points and reports how close it gets.

Run: ``python demos/01_splines.py``
"""

import numpy as np

from bscc.banded import bandwidth_profile
from bscc.coded_pipeline import chebyshev_nodes_second_kind
from bscc.spline_core import eval_basis, make_clamped_knots
from bscc.spline_fit import build_square_system, fit_natural_cubic

np.set_printoptions(precision=4, suppress=True)

# A cubic on four breakpoints: the end knots repeat four times.
kv = make_clamped_knots([0.0, 1.0, 2.0, 3.0])
print("knots:", kv.knots)
print("basis functions:", kv.n_basis)

# Batched evaluation returns the index of the first active function plus
# the p+1 nonzero values at each point.
z = np.array([0.0, 0.5, 1.5, 3.0])
first, values = eval_basis(kv, z)
for zi, f, row in zip(z, first, values):
    print(f"z={zi:3.1f}  B_{f}..B_{f + 3} = {row}  sum={row.sum():.15f}")

# The interpolation system plus two natural-end rows is banded.
x = chebyshev_nodes_second_kind(100)
per_row, lo, hi = bandwidth_profile(build_square_system(x))
print(f"\nsystem for 100 nodes: <= {per_row} nonzeros per row, bandwidth {lo}/{hi}")

spline = fit_natural_cubic(x, np.sin(x))
grid = np.linspace(x[0], x[-1], 2001)
err = np.abs(spline(grid) - np.sin(grid)).max()
print(f"sup error of the spline fit to sin: {err:.2e}")
print(f"second derivative at the ends: {spline.second_derivative(x[[0, -1]])}")
