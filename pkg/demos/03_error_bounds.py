"""How fast the decoding error falls as workers are added.

Measures the sup error of reconstructing ``sin`` from Chebyshev samples for
growing N and fits a log-log slope for both decoders. Then evaluates the
closed-form bounds and calibrates the unknown constant of the spline bound
against the measurements.

Run: ``python demos/03_error_bounds.py``
"""

import numpy as np

from bscc.bounds import (
    BoundInputs,
    bacc_bound,
    bscc_cheby_bound,
    calibrate_constant,
    corollary_bound,
    decay_slope,
    estimate_fourth_derivative_sup,
    knot_spacing_stats,
    operator_norm_upper_bound,
    sup_error,
)
from bscc.coded_pipeline import chebyshev_nodes_second_kind

ns = [20, 40, 80, 160]
g4 = estimate_fourth_derivative_sup(np.sin, (-1, 1))
print(f"estimated sup|sin''''| on [-1, 1]: {g4:.4f} (exact {np.sin(1):.4f})\n")

print("   N   spline err   berrut err   bscc bound   bacc bound")
spline_err, berrut_err, unit_bounds = [], [], []
for n in ns:
    x = chebyshev_nodes_second_kind(n)
    stats = knot_spacing_stats(x)
    spline_err.append(sup_error(x, np.sin))
    berrut_err.append(sup_error(x, np.sin, decoder="bacc"))
    unit_bounds.append(corollary_bound(BoundInputs(N=n, g4_sup=g4), stats))
    cheby = bscc_cheby_bound(BoundInputs(N=n, g4_sup=g4), stats.h_min)
    print(f"{n:4d}   {spline_err[-1]:.3e}    {berrut_err[-1]:.3e}    {cheby:.3e}    {bacc_bound(n):.3e}")

print(f"\nlog-log slope, spline decoder: {decay_slope(list(zip(ns, spline_err))):.2f}")
print(f"log-log slope, berrut decoder: {decay_slope(list(zip(ns, berrut_err))):.2f}")

c = calibrate_constant(spline_err, unit_bounds)
print(f"\nsmallest C making the spline bound hold on these runs: {c:.3e}")

for name, x in (("uniform", np.linspace(-1, 1, 50)), ("chebyshev", chebyshev_nodes_second_kind(50))):
    print(f"operator norm bound, 50 {name} nodes: {operator_norm_upper_bound(x):.3f}")
