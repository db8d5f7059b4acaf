"""Natural cubic spline interpolation in a clamped B-spline basis.

For ``M`` strictly increasing nodes the interpolant lives in the span of the
``M + 2`` cubic B-splines on the 4-clamped knot vector built from the nodes.
The ``M`` interpolation conditions plus ``s'' = 0`` at both end nodes give a
square system of order ``M + 2`` with lower and upper bandwidth 2:

    row 0        second derivatives of the basis at nodes[0]
    rows 1..M    basis values at nodes[0..M-1]
    row M+1      second derivatives of the basis at nodes[M-1]

which is solved with a banded LU factorization for any number of channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import BandedLU, BandedMatrix, banded_lu_factor
from .errors import InvalidNodes, ShapeError, TooFewNodes
from .spline_core import KnotVector, eval_basis, eval_basis_second_derivative, eval_spline, make_clamped_knots

__all__ = [
    "DEGREE",
    "MIN_NODES",
    "RectSystem",
    "CubicSplineInterpolant",
    "build_rect_matrix",
    "build_square_system",
    "natural_rhs",
    "fit_natural_cubic",
]

DEGREE = 3
MIN_NODES = 4
BANDWIDTH = 2


def _check_nodes(nodes) -> np.ndarray:
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1:
        raise InvalidNodes("nodes must be one-dimensional")
    if x.size < MIN_NODES:
        raise TooFewNodes(f"a natural cubic fit needs at least {MIN_NODES} distinct nodes, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(np.diff(x) <= 0):
        raise InvalidNodes("nodes must be finite and strictly increasing")
    return x


@dataclass(frozen=True)
class RectSystem:
    """Row-sparse ``M x (M+2)`` matrix of basis values at the nodes.

    Row ``i`` has its (at most four) nonzeros in columns
    ``first[i] .. first[i] + 3`` with values ``values[i]``.
    """

    first: np.ndarray
    values: np.ndarray

    @property
    def rows(self) -> int:
        return self.first.size

    @property
    def cols(self) -> int:
        return self.first.size + 2

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols))
        idx = self.first[:, None] + np.arange(DEGREE + 1)
        np.put_along_axis(a, idx, self.values, axis=1)
        return a


def build_rect_matrix(nodes) -> RectSystem:
    """Interpolation rows ``B_{j,3}(nodes[i])`` on the clamped knots of `nodes`."""
    x = _check_nodes(nodes)
    kv = make_clamped_knots(x, DEGREE)
    first, values = eval_basis(kv, x)
    return RectSystem(first, values)


def build_square_system(nodes) -> BandedMatrix:
    """Square natural-spline system of order ``M + 2`` in band storage."""
    x = _check_nodes(nodes)
    m = x.size
    kv = make_clamped_knots(x, DEGREE)
    first, values = eval_basis(kv, x)
    dfirst, dvalues = eval_basis_second_derivative(kv, x[[0, -1]])
    rows = np.concatenate([[0], np.arange(1, m + 1), [m + 1]])
    firsts = np.concatenate([dfirst[:1], first, dfirst[1:]])
    vals = np.vstack([dvalues[:1], values, dvalues[1:]])
    offset = firsts[:, None] + np.arange(DEGREE + 1) - rows[:, None]
    inside = np.abs(offset) <= BANDWIDTH
    # the fourth active function vanishes at a node, which keeps the band at 2
    if np.any(vals[~inside] != 0):
        raise InvalidNodes("basis entries fall outside the expected band")
    mat = BandedMatrix(m + 2, BANDWIDTH, BANDWIDTH)
    r = np.broadcast_to(rows[:, None], offset.shape)
    mat.band[offset[inside] + BANDWIDTH, r[inside]] = vals[inside]
    return mat


def natural_rhs(samples) -> np.ndarray:
    """Right-hand-side table: samples in rows ``1..M``, zeros in rows 0 and ``M+1``."""
    f = np.asarray(samples, dtype=float)
    f = f.reshape(f.shape[0], -1)
    out = np.zeros((f.shape[0] + 2, f.shape[1]))
    out[1:-1] = f
    return out


@dataclass(frozen=True)
class CubicSplineInterpolant:
    """Natural cubic spline ``s(z) = sum_j coeffs[j] B_{j,3}(z)``.

    ``coeffs`` has shape ``(M + 2, channels)``; calling the interpolant
    returns values of shape ``z.shape + channel_shape``.
    """

    nodes: np.ndarray
    knot_vector: KnotVector
    coeffs: np.ndarray
    channel_shape: tuple = ()

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        out = eval_spline(self.coeffs, self.knot_vector, DEGREE, z)
        return out.reshape(z.shape + self.channel_shape)

    def second_derivative(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        first, d2 = eval_basis_second_derivative(self.knot_vector, z.ravel())
        idx = first[:, None] + np.arange(DEGREE + 1)
        out = np.einsum("zi,zic->zc", d2, self.coeffs[idx])
        return out.reshape(z.shape + self.channel_shape)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])


def fit_natural_cubic(nodes, samples, *, lu: BandedLU | None = None) -> CubicSplineInterpolant:
    """Interpolate `samples` at `nodes` with a natural cubic spline.

    Args:
        nodes: ``M >= 4`` strictly increasing points.
        samples: Array whose first axis has length ``M``; any trailing axes
            are treated as independent channels sharing one factorization.
        lu: Optional precomputed factorization of ``build_square_system(nodes)``.
    """
    x = _check_nodes(nodes)
    f = np.asarray(samples, dtype=float)
    if f.ndim == 0 or f.shape[0] != x.size:
        raise ShapeError(f"samples must have {x.size} rows, got shape {f.shape}")
    if lu is None:
        lu = banded_lu_factor(build_square_system(x))
    elif lu.order != x.size + 2:
        raise ShapeError("factorization does not match the node count")
    coeffs = lu.solve(natural_rhs(f))
    return CubicSplineInterpolant(x, make_clamped_knots(x, DEGREE), coeffs, f.shape[1:])
