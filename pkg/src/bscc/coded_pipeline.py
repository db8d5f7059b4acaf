"""Encoding, simulated workers and the two decoders (B-spline and Berrut).

The master holds ``K`` equally shaped blocks ``X_0..X_{K-1}``. It encodes them
as ``u(z) = sum_j X_j Phi_j(z)`` with a cardinal basis on the encoding points
``betas`` (Lagrange or Berrut), sends ``u(alpha_i)`` to worker ``i``, and each
worker returns ``f(u(alpha_i))`` entrywise. From whatever subset of results
arrives, the master rebuilds ``f(u(z))`` and reads off ``f(X_j)`` at
``z = beta_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ExtrapolationError,
    InvalidCount,
    InvalidInput,
    InvalidNodes,
    NumericalOverflow,
    ReconstructionInfeasible,
    ShapeError,
)
from .spline_fit import MIN_NODES, fit_natural_cubic

__all__ = [
    "LAGRANGE",
    "BERRUT",
    "chebyshev_nodes_second_kind",
    "chebyshev_nodes_first_kind",
    "lagrange_basis",
    "berrut_basis",
    "basis_matrix",
    "Dataset",
    "EncodingConfig",
    "Share",
    "WorkerResult",
    "TargetFunction",
    "TARGET_FUNCTIONS",
    "get_target_function",
    "encode",
    "make_shares",
    "worker_eval",
    "run_workers",
    "survivor_alphas",
    "betas_outside_span",
    "bscc_reconstruct",
    "bacc_reconstruct",
]

LAGRANGE = "lagrange"
BERRUT = "berrut"
_BASIS_KINDS = (LAGRANGE, BERRUT)

# relative distance (to the node span) below which a point counts as a node
NODE_SNAP = 1e-12


def chebyshev_nodes_second_kind(n: int) -> np.ndarray:
    """``cos(i*pi/n)`` for ``i = 0..n-1``, sorted ascending (includes 1, excludes -1)."""
    if n < 2:
        raise InvalidCount(f"need at least 2 second-kind nodes, got {n}")
    return np.sort(np.cos(np.arange(n) * np.pi / n))


def chebyshev_nodes_first_kind(k: int) -> np.ndarray:
    """``cos((2j+1)*pi/(2k))`` for ``j = 0..k-1``, sorted ascending."""
    if k < 1:
        raise InvalidCount(f"need at least 1 first-kind node, got {k}")
    nodes = np.sort(np.cos((2 * np.arange(k) + 1) * np.pi / (2 * k)))
    if k % 2:
        nodes[k // 2] = 0.0  # cos(pi/2) is not exactly zero in floating point
    return nodes


def _distinct(points) -> np.ndarray:
    b = np.asarray(points, dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise InvalidNodes("points must be a non-empty 1D sequence")
    if np.unique(b).size != b.size:
        raise InvalidNodes("points must be distinct")
    return b


def _lagrange_matrix(betas: np.ndarray, z: np.ndarray) -> np.ndarray:
    diff = z[:, None] - betas[None, :]  # (nz, K)
    denom = betas[:, None] - betas[None, :]
    np.fill_diagonal(denom, 1.0)
    out = np.empty((z.size, betas.size))
    for j in range(betas.size):
        others = np.delete(np.arange(betas.size), j)
        out[:, j] = np.prod(diff[:, others], axis=1) / np.prod(denom[j, others])
    return out


def _berrut_matrix(betas: np.ndarray, z: np.ndarray) -> np.ndarray:
    weights = (-1.0) ** np.arange(betas.size)
    scale = max(float(np.ptp(betas)), 1.0)
    diff = z[:, None] - betas[None, :]
    hit = np.abs(diff) <= NODE_SNAP * scale
    out = np.empty((z.size, betas.size))
    on_node = hit.any(axis=1)
    if np.any(on_node):
        nearest = np.argmin(np.abs(diff[on_node]), axis=1)
        out[on_node] = 0.0
        out[np.nonzero(on_node)[0], nearest] = 1.0
    off = ~on_node
    if np.any(off):
        terms = weights / diff[off]
        out[off] = terms / terms.sum(axis=1, keepdims=True)
    return out


def basis_matrix(kind: str, betas, z) -> np.ndarray:
    """``Phi[i, j] = Phi_j(z_i)`` for the chosen basis family."""
    b = _distinct(betas)
    z = np.atleast_1d(np.asarray(z, dtype=float)).ravel()
    if kind == LAGRANGE:
        return _lagrange_matrix(b, z)
    if kind == BERRUT:
        return _berrut_matrix(b, z)
    raise InvalidInput(f"unknown basis kind {kind!r}; expected one of {_BASIS_KINDS}")


def lagrange_basis(betas, j: int, z):
    """Lagrange cardinal polynomial ``prod_{k != j} (z - b_k) / (b_j - b_k)``."""
    b = _distinct(betas)
    if not 0 <= j < b.size:
        raise IndexError(f"basis index {j} out of range 0..{b.size - 1}")
    z = np.asarray(z, dtype=float)
    out = _lagrange_matrix(b, z.ravel())[:, j].reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def berrut_basis(betas, j: int, z):
    """Berrut rational cardinal function with alternating weights ``(-1)^k``.

    ``((-1)^j / (z - b_j)) / sum_k ((-1)^k / (z - b_k))``, replaced by the
    indicator ``delta_ij`` when `z` is within ``1e-12 * span`` of ``b_i``.
    """
    b = _distinct(betas)
    if not 0 <= j < b.size:
        raise IndexError(f"basis index {j} out of range 0..{b.size - 1}")
    z = np.asarray(z, dtype=float)
    out = _berrut_matrix(b, z.ravel())[:, j].reshape(z.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Dataset:
    """``K >= 2`` equally shaped matrices, stored as one ``(K, rows, cols)`` array."""

    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=float)
        if b.ndim == 2:
            b = b[:, :, None]
        if b.ndim != 3:
            raise ShapeError(f"blocks must stack to a (K, rows, cols) array, got shape {b.shape}")
        if b.shape[0] < 2:
            raise ShapeError(f"need at least 2 blocks, got {b.shape[0]}")
        object.__setattr__(self, "blocks", b)

    @property
    def K(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.blocks.shape[1:]


@dataclass(frozen=True)
class EncodingConfig:
    """Basis family plus encoding points ``betas`` (K) and evaluation points ``alphas`` (N)."""

    basis_kind: str
    betas: np.ndarray
    alphas: np.ndarray

    def __post_init__(self):
        if self.basis_kind not in _BASIS_KINDS:
            raise InvalidInput(f"unknown basis kind {self.basis_kind!r}; expected one of {_BASIS_KINDS}")
        betas = np.asarray(self.betas, dtype=float)
        alphas = np.asarray(self.alphas, dtype=float)
        for name, pts in (("betas", betas), ("alphas", alphas)):
            if pts.ndim != 1 or pts.size == 0 or np.any(np.diff(pts) <= 0):
                raise InvalidNodes(f"{name} must be strictly increasing")
        if betas[0] < alphas[0] or betas[-1] > alphas[-1]:
            raise InvalidNodes("encoding points must lie within the span of the evaluation points")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def chebyshev(cls, n: int, k: int, basis_kind: str = LAGRANGE) -> "EncodingConfig":
        """First-kind Chebyshev ``betas`` and second-kind Chebyshev ``alphas``."""
        return cls(basis_kind, chebyshev_nodes_first_kind(k), chebyshev_nodes_second_kind(n))

    @property
    def N(self) -> int:
        return self.alphas.size

    @property
    def K(self) -> int:
        return self.betas.size


@dataclass(frozen=True)
class Share:
    worker_index: int
    alpha: float
    value: np.ndarray


@dataclass(frozen=True)
class WorkerResult:
    worker_index: int
    value: np.ndarray


@dataclass(frozen=True)
class TargetFunction:
    """Scalar function applied entrywise, with an optional closed-form fourth derivative."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    fourth_derivative: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


def _sigmoid(x):
    # exp of a non-positive argument only, so large |x| never overflows
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _sigmoid_d4(x):
    s = _sigmoid(x)
    return (1 - 14 * s + 36 * s**2 - 24 * s**3) * s * (1 - s)


TARGET_FUNCTIONS: dict[str, TargetFunction] = {
    f.name: f
    for f in (
        TargetFunction("identity", lambda x: x, lambda x: np.zeros_like(x)),
        TargetFunction("xsinx", lambda x: x * np.sin(x), lambda x: x * np.sin(x) - 4 * np.cos(x)),
        TargetFunction("sigmoid", _sigmoid, _sigmoid_d4),
        TargetFunction("sin", np.sin, np.sin),
        TargetFunction("exp", np.exp, np.exp),
        TargetFunction("square", np.square, lambda x: np.zeros_like(x)),
    )
}


def get_target_function(name: str | TargetFunction) -> TargetFunction:
    if isinstance(name, TargetFunction):
        return name
    try:
        return TARGET_FUNCTIONS[name]
    except KeyError:
        raise InvalidInput(f"unknown function {name!r}; choose from {sorted(TARGET_FUNCTIONS)}") from None


def encode(ds: Dataset, cfg: EncodingConfig, z) -> np.ndarray:
    """``u(z) = sum_j X_j Phi_j(z)``; a matrix for scalar `z`, a stack for an array."""
    if ds.K != cfg.K:
        raise ShapeError(f"dataset has {ds.K} blocks but {cfg.K} encoding points")
    z = np.asarray(z, dtype=float)
    phi = basis_matrix(cfg.basis_kind, cfg.betas, z)
    out = np.tensordot(phi, ds.blocks, axes=(1, 0))
    return out.reshape(z.shape + ds.block_shape)


def make_shares(ds: Dataset, cfg: EncodingConfig) -> list[Share]:
    values = encode(ds, cfg, cfg.alphas)
    return [Share(i, float(a), values[i]) for i, a in enumerate(cfg.alphas)]


def worker_eval(share: Share, f) -> WorkerResult:
    """Apply `f` entrywise to the share, as worker ``share.worker_index`` would."""
    f = get_target_function(f)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.asarray(f(share.value), dtype=float)
    if not np.all(np.isfinite(value)):
        raise NumericalOverflow(f"worker {share.worker_index} produced non-finite output")
    return WorkerResult(share.worker_index, value)


def run_workers(shares, f, survivors=None) -> list[WorkerResult]:
    """Evaluate the shares of the surviving workers (all workers if `survivors` is None)."""
    if survivors is None:
        return [worker_eval(s, f) for s in shares]
    keep = set(int(i) for i in survivors)
    return [worker_eval(s, f) for s in shares if s.worker_index in keep]


def _collect(results, cfg: EncodingConfig):
    idx = np.array([r.worker_index for r in results], dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= cfg.N):
        raise InvalidInput(f"worker index outside 0..{cfg.N - 1}")
    if np.unique(idx).size != idx.size:
        raise InvalidInput("duplicate worker results")
    order = np.argsort(idx)
    values = np.stack([np.asarray(results[i].value, dtype=float) for i in order]) if idx.size else None
    return cfg.alphas[idx[order]], values


def survivor_alphas(results, cfg: EncodingConfig) -> np.ndarray:
    return _collect(results, cfg)[0]


def betas_outside_span(alphas, betas) -> bool:
    """True if some encoding point lies outside ``[min(alphas), max(alphas)]``."""
    a = np.asarray(alphas, dtype=float)
    b = np.asarray(betas, dtype=float)
    return bool(np.any(b < a.min()) or np.any(b > a.max()))


def bscc_reconstruct(results, cfg: EncodingConfig, *, extrapolation: str = "clamp") -> np.ndarray:
    """Rebuild ``f(X_j)`` for every block from the surviving worker results.

    Fits one natural cubic spline per matrix entry over the sorted survivor
    evaluation points (a single factorization shared by all entries) and
    evaluates it at the encoding points.

    Args:
        results: Surviving ``WorkerResult`` objects, in any order.
        cfg: Encoding configuration used to produce the shares.
        extrapolation: ``"clamp"`` evaluates encoding points outside the
            survivor span at the nearest span end; ``"raise"`` raises
            `ExtrapolationError` instead.

    Returns:
        Array of shape ``(K, rows, cols)``.

    Raises:
        ReconstructionInfeasible: Fewer than four survivors.
    """
    if extrapolation not in ("clamp", "raise"):
        raise InvalidInput(f"extrapolation must be 'clamp' or 'raise', got {extrapolation!r}")
    if len(results) < MIN_NODES:
        raise ReconstructionInfeasible(f"{len(results)} survivors; a cubic fit needs at least {MIN_NODES}")
    alphas, values = _collect(results, cfg)
    z = cfg.betas
    if betas_outside_span(alphas, z):
        if extrapolation == "raise":
            raise ExtrapolationError(f"encoding points outside survivor span [{alphas[0]}, {alphas[-1]}]")
        z = np.clip(z, alphas[0], alphas[-1])
    spline = fit_natural_cubic(alphas, values)
    return spline(z)


def bacc_reconstruct(results, cfg: EncodingConfig) -> np.ndarray:
    """Berrut rational decoder over the sorted survivors, weights ``(-1)^i``."""
    if len(results) < 1:
        raise ReconstructionInfeasible("no surviving workers")
    alphas, values = _collect(results, cfg)
    phi = _berrut_matrix(alphas, cfg.betas)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.tensordot(phi, values, axes=(1, 0))
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow("Berrut decoder produced non-finite output")
    return out

