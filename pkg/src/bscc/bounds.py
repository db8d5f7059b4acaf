"""Error-bound evaluators and numerical checks for the spline decoder.

The constants ``C`` and ``C1`` in the approximation bounds are existential:
only their dependence on the spline degree is known. Evaluators take them as
inputs (default 1), and `calibrate_constant` finds the smallest value that
makes a bound hold on measured data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .banded import BandedMatrix
from .errors import InvalidInput, InvalidNodes, MissingInput, NumericalOverflow, TooFewNodes
from .spline_fit import MIN_NODES, build_square_system, fit_natural_cubic

__all__ = [
    "KnotSpacingStats",
    "BoundInputs",
    "knot_spacing_stats",
    "operator_norm_upper_bound",
    "corollary_bound",
    "theorem2_bound",
    "bscc_cheby_bound",
    "bacc_bound",
    "estimate_fourth_derivative_sup",
    "decay_slope",
    "sup_error",
    "calibrate_constant",
]

# dense inversion is O(M^3); the bound is a diagnostic, not a production path
MAX_DENSE_ORDER = 2000


@dataclass(frozen=True)
class KnotSpacingStats:
    h_max: float
    h_min: float

    @property
    def ratio(self) -> float:
        return self.h_max / self.h_min


@dataclass(frozen=True)
class BoundInputs:
    """Parameters shared by the approximation bounds.

    Attributes:
        N: Number of workers.
        S: Number of stragglers, ``0 <= S < N - 2``.
        C: Degree-dependent constant of the best-approximation estimate.
        C1: Degree-dependent constant of the operator-norm estimate.
        g4_sup: Sup norm of the fourth derivative of ``g = f(u(z))``.
        D_inf: Distance from ``g`` to the spline space, when known.
    """

    N: int
    S: int = 0
    C: float = 1.0
    C1: float = 1.0
    g4_sup: float = 0.0
    D_inf: float | None = None

    def __post_init__(self):
        if self.N < 3 or not 0 <= self.S < self.N - 2:
            raise InvalidInput(f"need 0 <= S < N - 2, got N={self.N}, S={self.S}")
        if self.C <= 0 or self.C1 <= 0:
            raise InvalidInput("constants C and C1 must be positive")
        if self.g4_sup < 0 or (self.D_inf is not None and self.D_inf < 0):
            raise InvalidInput("g4_sup and D_inf must be non-negative")

    @property
    def survivors(self) -> int:
        return self.N - self.S


def knot_spacing_stats(nodes) -> KnotSpacingStats:
    """Largest and smallest gap between consecutive distinct nodes."""
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidNodes("need at least 2 nodes")
    gaps = np.diff(x)
    if np.any(gaps <= 0):
        raise InvalidNodes("nodes must be strictly increasing")
    return KnotSpacingStats(float(gaps.max()), float(gaps.min()))


def operator_norm_upper_bound(nodes) -> float:
    """Max absolute row sum of the inverse system matrix without its first and last columns.

    Those two columns multiply the zero boundary entries of the right-hand
    side, so the remaining block maps samples to coefficients; with the
    partition of unity its infinity norm bounds the sup norm of the fitted
    spline per unit sup norm of the data.
    """
    x = np.asarray(nodes, dtype=float)
    if x.size < MIN_NODES:
        raise TooFewNodes(f"need at least {MIN_NODES} nodes, got {x.size}")
    if x.size + 2 > MAX_DENSE_ORDER:
        raise InvalidInput(f"dense inverse capped at order {MAX_DENSE_ORDER}; got {x.size + 2}")
    system: BandedMatrix = build_square_system(x)
    inv = np.linalg.inv(system.to_dense())
    return float(np.abs(inv[:, 1:-1]).sum(axis=1).max())


def corollary_bound(inputs: BoundInputs, stats: KnotSpacingStats) -> float:
    """``C (1 + C1 (M+2) h_max/h_min) h_max^4 ||g''''||``, ``M = N - S``.

    `stats` must come from the survivor nodes when ``S > 0``.
    """
    m = inputs.survivors
    return inputs.C * (1.0 + inputs.C1 * (m + 2) * stats.ratio) * stats.h_max**4 * inputs.g4_sup


def theorem2_bound(inputs: BoundInputs, stats: KnotSpacingStats) -> float:
    """``(1 + C1 (M+2) h_max/h_min) D_inf``; `D_inf` has no closed form and must be supplied."""
    if inputs.D_inf is None:
        raise MissingInput("D_inf (distance from g to the spline space) is required")
    return (1.0 + inputs.C1 * (inputs.survivors + 2) * stats.ratio) * inputs.D_inf


def bscc_cheby_bound(inputs: BoundInputs, h_min: float) -> float:
    """Corollary bound specialised to second-kind Chebyshev evaluation points with S stragglers."""
    if h_min <= 0:
        raise InvalidInput("h_min must be positive")
    n, s = inputs.N, inputs.S
    q = math.sin((s + 1) * math.pi / (2 * n))
    return 2 * inputs.C * (q**4 + inputs.C1 * (n - s + 2) / h_min * q**5) * inputs.g4_sup


def bacc_bound(n: int, s: int = 0) -> float:
    """Berrut decoder error scaling ``(1 + (1+S)(3+S) pi^2 / 4) sin((S+1) pi / (2N))``."""
    if not 0 <= s < n:
        raise InvalidInput(f"need 0 <= S < N, got N={n}, S={s}")
    return (1 + (1 + s) * (3 + s) * math.pi**2 / 4) * math.sin((s + 1) * math.pi / (2 * n))


_CENTRAL_D4 = np.array([1.0, -4.0, 6.0, -4.0, 1.0])
_FORWARD_D4 = np.array([3.0, -14.0, 26.0, -24.0, 11.0, -2.0])


def estimate_fourth_derivative_sup(g, interval, grid_size: int = 10_000, step: float | None = None) -> float:
    """Estimate ``max |g''''|`` on `interval` by finite differences.

    The five-point central stencil is evaluated at `grid_size` uniformly
    spaced centres whose stencils fit inside the interval, and second-order
    six-point one-sided stencils cover the two end points, so `g` is never
    sampled outside the interval. Accuracy is ``O(step^2)``.

    The stencil step defaults to ``width * eps**(1/6)`` (about
    ``2.5e-3 * width``), which balances truncation against the
    ``~16 eps / step^4`` rounding error; a step as small as the grid spacing
    would be dominated by rounding.
    """
    a, b = map(float, interval)
    if not b > a:
        raise InvalidInput("interval must have positive width")
    width = b - a
    if step is None:
        step = width * np.finfo(float).eps ** (1 / 6)
    if not 0 < 5 * step < width:
        raise InvalidInput("finite-difference step too large for the interval")
    centres = np.linspace(a + 2 * step, b - 2 * step, grid_size)
    pts = np.concatenate(
        [
            (centres[:, None] + np.arange(-2, 3) * step).ravel(),
            a + np.arange(6) * step,
            b - np.arange(6) * step,
        ]
    )
    with np.errstate(all="ignore"):
        samples = np.asarray(g(pts), dtype=float)
    if not np.all(np.isfinite(samples)):
        raise NumericalOverflow("non-finite samples while estimating the fourth derivative")
    central = samples[: 5 * grid_size].reshape(grid_size, 5) @ _CENTRAL_D4
    ends = samples[5 * grid_size :].reshape(2, 6) @ _FORWARD_D4
    return float(np.abs(np.concatenate([central, ends])).max() / step**4)


def decay_slope(pairs) -> float:
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise InvalidInput("need at least 3 (N, error) pairs")
    if np.any(arr <= 0):
        raise InvalidInput("N and error values must be positive")
    return float(np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0])


def sup_error(nodes, g, grid_points: int = 2001, decoder: str = "bscc") -> float:
    """Sup-norm error of reconstructing scalar `g` from its samples at `nodes`.

    Measured on a uniform grid over the node span. `decoder` is ``"bscc"``
    (natural cubic spline) or ``"bacc"`` (Berrut rational, weights ``(-1)^i``).
    """
    x = np.asarray(nodes, dtype=float)
    grid = np.linspace(x[0], x[-1], grid_points)
    if decoder == "bscc":
        approx = fit_natural_cubic(x, g(x))(grid)
    elif decoder == "bacc":
        from .coded_pipeline import BERRUT, basis_matrix

        approx = basis_matrix(BERRUT, x, grid) @ g(x)
    else:
        raise InvalidInput(f"unknown decoder {decoder!r}")
    return float(np.abs(approx - g(grid)).max())


def calibrate_constant(measured, bound_at_unit_constant) -> float:
    """Smallest multiplier making ``constant * bound >= measured`` at every point."""
    m = np.asarray(measured, dtype=float)
    b = np.asarray(bound_at_unit_constant, dtype=float)
    if np.any(b <= 0):
        raise InvalidInput("bound values must be positive to calibrate a constant")
    return float(np.max(m / b))
