"""Knot vectors and B-spline basis evaluation.

Two evaluation routes are provided. ``basis_value`` and
``basis_second_derivative`` follow the Cox-de Boor recursion literally, one
basis function and one point at a time; they are slow but transparent and
serve as reference implementations. ``eval_basis`` and
``eval_basis_second_derivative`` evaluate every basis function that is active
at a batch of points with the triangular form of the same recursion, and are
what the fitting code uses.

Conventions:

* Intervals are half-open, ``[t_k, t_{k+1})``, except the last nondegenerate
  interval which is closed on the right, so that the last basis function of a
  clamped knot vector equals 1 at the right end.
* A term of the recursion whose denominator is zero is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeError, DomainError, InvalidNodes, ShapeError, TooFewNodes

__all__ = [
    "KnotVector",
    "BasisIndexRange",
    "make_clamped_knots",
    "find_span",
    "basis_value",
    "basis_second_derivative",
    "active_basis_range",
    "eval_basis",
    "eval_basis_second_derivative",
    "eval_spline",
]


@dataclass(frozen=True)
class KnotVector:
    """Non-decreasing knot sequence together with its spline degree.

    Attributes:
        knots: 1D float array of length ``m``. Stored read-only.
        degree: Spline degree ``p``; requires ``m >= p + 2``.
        clamped: Whether the end knots have multiplicity ``p + 1``.
    """

    knots: np.ndarray
    degree: int
    clamped: bool = False

    def __post_init__(self):
        t = np.array(self.knots, dtype=float)
        if t.ndim != 1:
            raise InvalidNodes("knots must be one-dimensional")
        if self.degree < 0:
            raise DegreeError(f"degree must be non-negative, got {self.degree}")
        if t.size < self.degree + 2:
            raise TooFewNodes(f"need at least {self.degree + 2} knots for degree {self.degree}, got {t.size}")
        if not np.all(np.isfinite(t)):
            raise InvalidNodes("knots must be finite")
        if np.any(np.diff(t) < 0):
            raise InvalidNodes("knots must be non-decreasing")
        if t[0] == t[-1]:
            raise InvalidNodes("knot span is empty")
        if self.clamped:
            p = self.degree
            if np.any(t[: p + 1] != t[0]) or np.any(t[-p - 1 :] != t[-1]):
                raise InvalidNodes(f"clamped knot vector needs end multiplicity {p + 1}")
            interior = t[p:-p] if p > 0 else t
            if np.any(np.diff(interior) <= 0):
                raise InvalidNodes("interior knots of a clamped vector must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)

    @property
    def m(self) -> int:
        return self.knots.size

    @property
    def n_basis(self) -> int:
        """Number of degree-``p`` basis functions, ``m - p - 1``."""
        return self.knots.size - self.degree - 1

    @property
    def span(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def __len__(self):
        return self.knots.size


@dataclass(frozen=True)
class BasisIndexRange:
    """Inclusive range ``lo..hi`` of basis indices that may be nonzero at a point."""

    lo: int
    hi: int

    def __contains__(self, j):
        return self.lo <= j <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __len__(self):
        return self.hi - self.lo + 1


def make_clamped_knots(points, degree: int = 3) -> KnotVector:
    """Build the ``(degree+1)``-clamped knot vector on strictly increasing `points`.

    The first and last points are repeated ``degree + 1`` times and the
    interior points appear once, giving ``n + 2*degree`` knots and
    ``n + degree - 1`` basis functions.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1:
        raise InvalidNodes("points must be one-dimensional")
    if degree < 0:
        raise DegreeError(f"degree must be non-negative, got {degree}")
    if pts.size <= degree:
        raise TooFewNodes(f"need more than {degree} points for degree {degree}, got {pts.size}")
    if pts.size < 2 or np.any(np.diff(pts) <= 0):
        raise InvalidNodes("points must be strictly increasing")
    knots = np.concatenate([np.repeat(pts[0], degree + 1), pts[1:-1], np.repeat(pts[-1], degree + 1)])
    return KnotVector(knots, degree, clamped=True)


def _last_interval(t: np.ndarray) -> int:
    # index k of the last nondegenerate interval [t_k, t_{k+1}]
    return int(np.searchsorted(t, t[-1], side="left")) - 1


def _check_domain(kv: KnotVector, z: np.ndarray) -> None:
    a, b = kv.knots[0], kv.knots[-1]
    if np.any(~np.isfinite(z)) or np.any(z < a) or np.any(z > b):
        raise DomainError(f"evaluation point outside knot span [{a}, {b}]")


def find_span(kv: KnotVector, z):
    """Index ``k`` of the nondegenerate knot interval containing `z`.

    Vectorized over `z`; the last interval is closed on the right.
    """
    z = np.asarray(z, dtype=float)
    _check_domain(kv, z)
    t = kv.knots
    k = np.searchsorted(t, z, side="right") - 1
    k = np.minimum(k, _last_interval(t))
    return k


def _cox_de_boor(t, j, p, z, k_last):
    if p == 0:
        if t[j] <= z < t[j + 1]:
            return 1.0
        return 1.0 if (j == k_last and z == t[-1]) else 0.0
    value = 0.0
    den = t[j + p] - t[j]
    if den != 0.0:
        value += (z - t[j]) / den * _cox_de_boor(t, j, p - 1, z, k_last)
    den = t[j + p + 1] - t[j + 1]
    if den != 0.0:
        value += (t[j + p + 1] - z) / den * _cox_de_boor(t, j + 1, p - 1, z, k_last)
    return value


def _check_index(kv: KnotVector, j: int, p: int) -> None:
    if p < 0 or kv.m < p + 2:
        raise DegreeError(f"degree {p} not supported by a knot vector of length {kv.m}")
    if not 0 <= j <= kv.m - p - 2:
        raise IndexError(f"basis index {j} out of range 0..{kv.m - p - 2}")


def basis_value(kv: KnotVector, j: int, p: int | None = None, z: float = 0.0) -> float:
    """Value of ``B_{j,p}(z)`` by direct Cox-de Boor recursion."""
    p = kv.degree if p is None else p
    _check_index(kv, j, p)
    _check_domain(kv, np.asarray(z, dtype=float))
    return _cox_de_boor(kv.knots, j, p, float(z), _last_interval(kv.knots))


def basis_second_derivative(kv: KnotVector, j: int, p: int | None = None, z: float = 0.0) -> float:
    """Second derivative ``B''_{j,p}(z)``.

    Applies the degree-lowering derivative identity

        B'_{j,p} = p * (B_{j,p-1} / (t_{j+p} - t_j) - B_{j+1,p-1} / (t_{j+p+1} - t_{j+1}))

    twice, dropping zero-denominator terms, and evaluates the resulting
    degree ``p-2`` functions with `basis_value`.
    """
    p = kv.degree if p is None else p
    if p < 2:
        raise DegreeError(f"second derivative needs degree >= 2, got {p}")
    _check_index(kv, j, p)
    _check_domain(kv, np.asarray(z, dtype=float))
    t = kv.knots
    k_last = _last_interval(t)
    z = float(z)

    def first_derivative(i, q):
        # B'_{i,q}(z) via degree q-1 values
        out = 0.0
        den = t[i + q] - t[i]
        if den != 0.0:
            out += _cox_de_boor(t, i, q - 1, z, k_last) / den
        den = t[i + q + 1] - t[i + 1]
        if den != 0.0:
            out -= _cox_de_boor(t, i + 1, q - 1, z, k_last) / den
        return q * out

    out = 0.0
    den = t[j + p] - t[j]
    if den != 0.0:
        out += first_derivative(j, p - 1) / den
    den = t[j + p + 1] - t[j + 1]
    if den != 0.0:
        out -= first_derivative(j + 1, p - 1) / den
    return p * out


def active_basis_range(kv: KnotVector, p: int | None = None, z: float = 0.0) -> BasisIndexRange:
    """Consecutive basis indices that can be nonzero at `z` (at most ``p + 1``)."""
    p = kv.degree if p is None else p
    k = int(find_span(kv, z))
    n_basis = kv.m - p - 1
    return BasisIndexRange(max(k - p, 0), min(k, n_basis - 1))


def _padded(t: np.ndarray, p: int) -> np.ndarray:
    # extra end knots keep the triangular scheme in range on unclamped vectors;
    # basis functions defined on the original knots are unaffected
    return np.concatenate([np.repeat(t[0], p), t, np.repeat(t[-1], p)])


def _triangular(tp: np.ndarray, kp: np.ndarray, p: int, z: np.ndarray) -> np.ndarray:
    """Degree-`p` values of the ``p + 1`` functions active on padded span `kp`."""
    nz = z.size
    values = np.zeros((nz, p + 1))
    values[:, 0] = 1.0
    left = np.empty((nz, p + 1))
    right = np.empty((nz, p + 1))
    for d in range(1, p + 1):
        left[:, d] = z - tp[kp + 1 - d]
        right[:, d] = tp[kp + d] - z
        saved = np.zeros(nz)
        for r in range(d):
            temp = values[:, r] / (right[:, r + 1] + left[:, d - r])
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, d - r] * temp
        values[:, d] = saved
    return values


def eval_basis(kv: KnotVector, z, p: int | None = None):
    """All basis functions of degree `p` that are active at each point of `z`.

    Returns:
        ``(first, values)`` where ``first`` has the shape of `z` and
        ``values[..., i]`` is ``B_{first + i, p}(z)`` for ``i = 0..p``.
        On unclamped knot vectors ``first`` may be negative near the left
        end; entries with an index outside ``0..n_basis-1`` are zero.
    """
    p = kv.degree if p is None else p
    if p < 0 or kv.m < p + 2:
        raise DegreeError(f"degree {p} not supported by a knot vector of length {kv.m}")
    z = np.asarray(z, dtype=float)
    shape = z.shape
    zf = z.ravel()
    k = find_span(kv, zf)
    tp = _padded(kv.knots, p)
    values = _triangular(tp, k + p, p, zf)
    first = k - p
    n_basis = kv.m - p - 1
    idx = first[:, None] + np.arange(p + 1)
    values[(idx < 0) | (idx >= n_basis)] = 0.0
    return first.reshape(shape), values.reshape(shape + (p + 1,))


def eval_basis_second_derivative(kv: KnotVector, z, p: int | None = None):
    """Second derivatives of the active basis functions; same layout as `eval_basis`."""
    p = kv.degree if p is None else p
    if p < 2:
        raise DegreeError(f"second derivative needs degree >= 2, got {p}")
    if kv.m < p + 2:
        raise DegreeError(f"degree {p} not supported by a knot vector of length {kv.m}")
    z = np.asarray(z, dtype=float)
    shape = z.shape
    zf = z.ravel()
    k = find_span(kv, zf)
    tp = _padded(kv.knots, p)
    low = np.zeros((zf.size, p + 3))
    # low[:, i] holds B_{k-p+i, p-2}; only i = 2..p can be nonzero on span k
    low[:, 2 : p + 1] = _triangular(tp, k + p, p - 2, zf)

    def inv(a, b):
        d = a - b
        return np.divide(1.0, d, out=np.zeros_like(d), where=d != 0)

    j = (k - p)[:, None] + np.arange(p + 1) + p  # padded index of t_j
    d1 = inv(tp[j + p], tp[j])
    d2 = inv(tp[j + p + 1], tp[j + 1])
    e1 = inv(tp[j + p - 1], tp[j])
    e2 = inv(tp[j + p], tp[j + 1])
    e3 = inv(tp[j + p + 1], tp[j + 2])
    b0, b1, b2 = low[:, : p + 1], low[:, 1 : p + 2], low[:, 2 : p + 3]
    values = p * (p - 1) * (b0 * d1 * e1 - b1 * (d1 + d2) * e2 + b2 * d2 * e3)
    first = k - p
    n_basis = kv.m - p - 1
    idx = first[:, None] + np.arange(p + 1)
    values[(idx < 0) | (idx >= n_basis)] = 0.0
    return first.reshape(shape), values.reshape(shape + (p + 1,))


def eval_spline(coeffs, kv: KnotVector, p: int | None = None, z=0.0) -> np.ndarray:
    """Evaluate ``sum_j coeffs[j] * B_{j,p}(z)`` using only the active basis range.

    Args:
        coeffs: Array of shape ``(n_basis,)`` or ``(n_basis, channels)``.
        kv: Knot vector.
        p: Degree; defaults to ``kv.degree``.
        z: Scalar or array of evaluation points.

    Returns:
        Array of shape ``z.shape + coeffs.shape[1:]``.
    """
    p = kv.degree if p is None else p
    coeffs = np.asarray(coeffs, dtype=float)
    n_basis = kv.m - p - 1
    if coeffs.ndim == 0 or coeffs.shape[0] != n_basis:
        raise ShapeError(f"expected {n_basis} coefficients per channel, got shape {coeffs.shape}")
    z = np.asarray(z, dtype=float)
    first, values = eval_basis(kv, z.ravel(), p)
    idx = np.clip(first[:, None] + np.arange(p + 1), 0, n_basis - 1)
    gathered = coeffs[idx]  # (nz, p+1, *channels)
    out = np.einsum("zi,zi...->z...", values, gathered)
    return out.reshape(z.shape + coeffs.shape[1:])
