"""Band-storage matrices and LU factorization with partial pivoting.

Storage follows the diagonal-offset layout: ``band[r, i]`` holds
``A[i, i + r - lower_bw]``, so row ``lower_bw`` of the table is the main
diagonal. Entries whose column falls outside ``0..order-1`` are padding and
are kept at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, SingularMatrix

__all__ = ["BandedMatrix", "BandedLU", "banded_lu_factor", "bandwidth_profile"]

PIVOT_RTOL = 1e-13


@dataclass
class BandedMatrix:
    """Square matrix of order `order` stored by diagonals."""

    order: int
    lower_bw: int
    upper_bw: int
    band: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        shape = (self.lower_bw + self.upper_bw + 1, self.order)
        if self.band is None:
            self.band = np.zeros(shape)
        else:
            self.band = np.asarray(self.band, dtype=float)
            if self.band.shape != shape:
                raise ShapeError(f"band table must have shape {shape}, got {self.band.shape}")

    @classmethod
    def from_dense(cls, a, lower_bw: int, upper_bw: int) -> "BandedMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {a.shape}")
        n = a.shape[0]
        i, j = np.nonzero(a)
        off = j - i
        if np.any(off < -lower_bw) or np.any(off > upper_bw):
            raise ShapeError("matrix has nonzero entries outside the requested band")
        m = cls(n, lower_bw, upper_bw)
        m.band[off + lower_bw, i] = a[i, j]
        return m

    def __getitem__(self, ij):
        i, j = ij
        r = j - i + self.lower_bw
        if 0 <= r <= self.lower_bw + self.upper_bw:
            return self.band[r, i]
        return 0.0

    def __setitem__(self, ij, value):
        i, j = ij
        r = j - i + self.lower_bw
        if not 0 <= r <= self.lower_bw + self.upper_bw:
            if value == 0:
                return
            raise ShapeError(f"entry ({i}, {j}) lies outside the band")
        self.band[r, i] = value

    def set_row(self, i: int, first_col: int, values) -> None:
        """Write a contiguous run of row `i` starting at column `first_col`."""
        for c, v in enumerate(np.asarray(values, dtype=float)):
            self[i, first_col + c] = v

    def to_dense(self) -> np.ndarray:
        n, kl = self.order, self.lower_bw
        a = np.zeros((n, n))
        for r in range(self.band.shape[0]):
            off = r - kl
            i = np.arange(max(0, -off), min(n, n - off))
            a[i, i + off] = self.band[r, i]
        return a

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n, kl = self.order, self.lower_bw
        y = np.zeros(x.shape)
        for r in range(self.band.shape[0]):
            off = r - kl
            i = np.arange(max(0, -off), min(n, n - off))
            coef = self.band[r, i].reshape((-1,) + (1,) * (x.ndim - 1))
            y[i] += coef * x[i + off]
        return y

    def max_row_norm(self) -> float:
        return float(np.abs(self.band).sum(axis=0).max()) if self.order else 0.0


@dataclass(frozen=True)
class BandedLU:
    """Factors ``P A = L U`` of a banded matrix.

    ``upper[k, c]`` is ``U[k, k + c]`` (the upper band is widened to
    ``lower_bw + upper_bw`` by pivoting fill), ``lower[k, i]`` is the
    multiplier applied to row ``k + 1 + i`` at step ``k``, and ``piv[k]`` is
    the row swapped with row ``k`` before that step.
    """

    order: int
    lower_bw: int
    upper_bw: int
    upper: np.ndarray
    lower: np.ndarray
    piv: np.ndarray

    def solve(self, rhs) -> np.ndarray:
        """Solve ``A x = rhs`` for one or many right-hand-side columns."""
        b = np.array(rhs, dtype=float)
        if b.shape[0] != self.order:
            raise ShapeError(f"right-hand side has {b.shape[0]} rows, expected {self.order}")
        n, kl = self.order, self.lower_bw
        width = self.upper.shape[1]
        upper, lower, piv = self.upper, self.lower, self.piv
        for k in range(n):
            p = piv[k]
            if p != k:
                b[[k, p]] = b[[p, k]]
            stop = min(k + 1 + kl, n)
            if stop > k + 1:
                b[k + 1 : stop] -= np.multiply.outer(lower[k, : stop - k - 1], b[k])
        x = b
        for k in range(n - 1, -1, -1):
            stop = min(k + width, n)
            if stop > k + 1:
                x[k] -= upper[k, 1 : stop - k] @ x[k + 1 : stop]
            x[k] /= upper[k, 0]
        return x


def banded_lu_factor(m: BandedMatrix) -> BandedLU:
    """LU-factor `m` with partial pivoting restricted to the band.

    Cost is ``O(order * lower_bw * (lower_bw + upper_bw))``, linear in the
    order for fixed bandwidths.

    Raises:
        SingularMatrix: A pivot is at or below ``1e-13`` times the largest
            absolute row sum.
    """
    n, kl, ku = m.order, m.lower_bw, m.upper_bw
    width = kl + ku + 1  # columns k .. k+kl+ku of the active window
    tol = PIVOT_RTOL * m.max_row_norm()

    def original_row(i, col0):
        # columns col0 .. col0+width-1 of row i of the input matrix
        out = np.zeros(width)
        lo = max(col0, i - kl)
        hi = min(col0 + width, i + ku + 1, n)
        if hi > lo:
            cols = np.arange(lo, hi)
            out[cols - col0] = m.band[cols - i + kl, i]
        return out

    upper = np.zeros((n, width))
    lower = np.zeros((n, kl))
    piv = np.arange(n)
    window = np.zeros((kl + 1, width))
    for i in range(min(kl + 1, n)):
        window[i] = original_row(i, 0)

    for k in range(n):
        rows = min(kl + 1, n - k)
        p = int(np.argmax(np.abs(window[:rows, 0])))
        if abs(window[p, 0]) <= tol or window[p, 0] == 0.0:
            raise SingularMatrix(f"pivot {window[p, 0]:.3e} at step {k} below tolerance {tol:.3e}")
        if p:
            window[[0, p]] = window[[p, 0]]
            piv[k] = k + p
        upper[k] = window[0]
        if rows > 1:
            mult = window[1:rows, 0] / window[0, 0]
            lower[k, : rows - 1] = mult
            window[1:rows] -= np.multiply.outer(mult, window[0])
        # slide to step k+1: drop the pivot row and column, pull in row k+1+kl
        window[:-1, :-1] = window[1:, 1:]
        window[:-1, -1] = 0.0
        nxt = k + 1 + kl
        window[-1] = original_row(nxt, k + 1) if nxt < n else 0.0
    return BandedLU(n, kl, ku, upper, lower, piv)


def bandwidth_profile(m: BandedMatrix) -> tuple[int, int, int]:
    """``(max nonzeros in any row, lower bandwidth, upper bandwidth)`` of stored entries."""
    nz = m.band != 0
    per_row = int(nz.sum(axis=0).max()) if m.order else 0
    offsets = np.nonzero(nz.any(axis=1))[0] - m.lower_bw
    if offsets.size == 0:
        return 0, 0, 0
    return per_row, int(max(0, -offsets.min())), int(max(0, offsets.max()))
