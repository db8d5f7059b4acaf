"""Seeded Monte Carlo comparison of the spline (BSCC) and Berrut (BACC) decoders.

Each trial draws a uniform random dataset and a uniformly random set of
surviving workers, runs the full encode / compute / decode pipeline and
records the relative error

    e_rel = ||Y - Y'||^2 / ||Y||^2

over all K blocks, where ``Y = f(X_j)`` is computed centrally.

Sampling streams are seeded from ``(seed, S, trial)`` only, never from the
scheme, so both decoders see the same dataset and survivors (paired design).
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .coded_pipeline import (
    BERRUT,
    LAGRANGE,
    Dataset,
    EncodingConfig,
    bacc_reconstruct,
    betas_outside_span,
    bscc_reconstruct,
    get_target_function,
    make_shares,
    run_workers,
)
from .errors import BSCCError, DegenerateReference, InvalidInput, InvalidRange, InvalidStragglerCount, IoError, ShapeError
from .spline_fit import MIN_NODES

__all__ = [
    "BSCC",
    "BACC",
    "ExperimentConfig",
    "TrialRecord",
    "Aggregate",
    "ExperimentResult",
    "splitmix64",
    "trial_seed",
    "sample_dataset",
    "sample_stragglers",
    "relative_error",
    "run_trial",
    "run_experiment",
    "aggregate",
    "emit_csv",
    "read_records_csv",
    "read_aggregates_csv",
    "parse_config",
    "load_config",
    "panel_configs",
]

BSCC = "bscc"
BACC = "bacc"
SCHEMES = (BSCC, BACC)

RECORD_HEADER = ["scheme", "encoder", "N", "K", "S", "trial", "seed", "e_rel", "e_rel_db", "beta_clamped"]
AGGREGATE_HEADER = ["scheme", "encoder", "S", "mean_e_rel", "mean_db", "std_db", "trials"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 100
    K: int = 8
    block_rows: int = 5
    block_cols: int = 5
    s_values: tuple[int, ...] = (0,)
    trials: int = 1000
    seed: int = 0
    encoder: str = LAGRANGE
    schemes: tuple[str, ...] = SCHEMES
    function: str = "xsinx"
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "s_values", tuple(int(s) for s in self.s_values))
        object.__setattr__(self, "schemes", tuple(str(s).lower() for s in self.schemes))
        object.__setattr__(self, "encoder", str(self.encoder).lower())
        if self.K < 2 or self.N < MIN_NODES:
            raise InvalidInput(f"need K >= 2 and N >= {MIN_NODES}, got K={self.K}, N={self.N}")
        if self.block_rows < 1 or self.block_cols < 1:
            raise InvalidInput("block dimensions must be positive")
        if self.trials < 1:
            raise InvalidInput("trials must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if self.encoder not in (LAGRANGE, BERRUT):
            raise InvalidInput(f"unknown encoder {self.encoder!r}")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise InvalidInput(f"schemes must be a non-empty subset of {SCHEMES}")
        for s in self.s_values:
            if not 0 <= s <= self.N - MIN_NODES:
                raise InvalidStragglerCount(f"S={s} leaves fewer than {MIN_NODES} of N={self.N} workers")
        if not self.lo < self.hi:
            raise InvalidRange(f"uniform support needs lo < hi, got [{self.lo}, {self.hi}]")
        get_target_function(self.function)

    def encoding(self) -> EncodingConfig:
        return EncodingConfig.chebyshev(self.N, self.K, self.encoder)


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    encoder: str
    N: int
    K: int
    S: int
    trial_index: int
    seed: int
    e_rel: float
    e_rel_db: float
    clamped_beta_flag: bool
    error: str = ""


@dataclass(frozen=True)
class Aggregate:
    scheme: str
    encoder: str
    S: int
    mean_e_rel: float
    mean_db: float
    std_db: float
    trials: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord] = field(default_factory=list)
    aggregates: list[Aggregate] = field(default_factory=list)

    def aggregate_for(self, scheme: str, s: int) -> Aggregate:
        for a in self.aggregates:
            if a.scheme == scheme and a.S == s:
                return a
        raise KeyError((scheme, s))


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 generator: advance by the golden gamma, then mix."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, s: int, trial_index: int) -> int:
    """Per-trial sampling seed ``mix(mix(mix(seed) ^ S) ^ trial)``; independent of the scheme."""
    return splitmix64(splitmix64(splitmix64(seed & _MASK64) ^ s) ^ trial_index)


def sample_dataset(cfg: ExperimentConfig, rng: np.random.Generator) -> Dataset:
    if not cfg.lo < cfg.hi:
        raise InvalidRange(f"uniform support needs lo < hi, got [{cfg.lo}, {cfg.hi}]")
    return Dataset(rng.uniform(cfg.lo, cfg.hi, size=(cfg.K, cfg.block_rows, cfg.block_cols)))


def sample_stragglers(n: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of the ``n - s`` surviving workers, a uniformly random subset."""
    if not 0 <= s <= n - MIN_NODES:
        raise InvalidStragglerCount(f"S={s} leaves fewer than {MIN_NODES} of N={n} workers")
    return np.sort(rng.permutation(n)[: n - s])


def relative_error(exact, approx) -> float:
    """Squared Frobenius error over all blocks divided by the squared norm of `exact`."""
    y = np.asarray(exact, dtype=float)
    yp = np.asarray(approx, dtype=float)
    if y.shape != yp.shape:
        raise ShapeError(f"shape mismatch {y.shape} vs {yp.shape}")
    denom = float(np.sum(y * y))
    if denom == 0.0:
        raise DegenerateReference("reference output is identically zero")
    return float(np.sum((y - yp) ** 2)) / denom


def _to_db(e: float) -> float:
    if math.isnan(e):
        return math.nan
    return 10.0 * math.log10(e) if e > 0 else -math.inf


def _trial_inputs(cfg: ExperimentConfig, s: int, trial_index: int):
    seed = trial_seed(cfg.seed, s, trial_index)
    rng = np.random.Generator(np.random.PCG64(seed))
    ds = sample_dataset(cfg, rng)
    survivors = sample_stragglers(cfg.N, s, rng)
    return seed, ds, survivors


def _evaluate(cfg, enc, scheme, s, trial_index, seed, ds, results, exact) -> TrialRecord:
    alphas = enc.alphas[[r.worker_index for r in results]]
    clamped = scheme == BSCC and betas_outside_span(alphas, enc.betas)
    try:
        if scheme == BSCC:
            approx = bscc_reconstruct(results, enc, extrapolation="clamp")
        else:
            approx = bacc_reconstruct(results, enc)
        e = relative_error(exact, approx)
        err = ""
    except BSCCError as exc:
        e, err = math.nan, f"{type(exc).__name__}: {exc}"
    return TrialRecord(scheme, cfg.encoder, cfg.N, cfg.K, s, trial_index, seed, e, _to_db(e), clamped, err)


def run_trial(cfg: ExperimentConfig, scheme: str, s: int, trial_index: int) -> TrialRecord:
    """Run one seeded trial; reconstruction failures are recorded, not raised."""
    scheme = scheme.lower()
    if scheme not in SCHEMES:
        raise InvalidInput(f"unknown scheme {scheme!r}")
    enc = cfg.encoding()
    f = get_target_function(cfg.function)
    seed, ds, survivors = _trial_inputs(cfg, s, trial_index)
    results = run_workers(make_shares(ds, enc), f, survivors)
    return _evaluate(cfg, enc, scheme, s, trial_index, seed, ds, results, f(ds.blocks))


def aggregate(records, config: ExperimentConfig | None = None) -> list[Aggregate]:
    """Per (scheme, S) mean of linear e_rel, its dB value, and the spread of per-trial dB.

    Trials whose reconstruction failed are excluded; ``trials`` counts the rest.
    """
    groups: dict[tuple[str, str, int], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.scheme, r.encoder, r.S), []).append(r)
    out = []
    for (scheme, encoder, s), rs in groups.items():
        e = np.array([r.e_rel for r in rs if np.isfinite(r.e_rel)])
        db = np.array([r.e_rel_db for r in rs if np.isfinite(r.e_rel_db)])
        mean = float(e.mean()) if e.size else math.nan
        std = float(db.std(ddof=1)) if db.size > 1 else 0.0
        out.append(Aggregate(scheme, encoder, s, mean, _to_db(mean), std, int(e.size)))
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """All schemes x straggler counts x trials, ordered by (scheme, S, trial)."""
    enc = cfg.encoding()
    f = get_target_function(cfg.function)
    by_key: dict[tuple[str, int, int], TrialRecord] = {}
    for s in cfg.s_values:
        for t in range(cfg.trials):
            seed, ds, survivors = _trial_inputs(cfg, s, t)
            results = run_workers(make_shares(ds, enc), f, survivors)
            exact = f(ds.blocks)
            for scheme in cfg.schemes:
                by_key[(scheme, s, t)] = _evaluate(cfg, enc, scheme, s, t, seed, ds, results, exact)
    order = {sc: i for i, sc in enumerate(cfg.schemes)}
    records = [by_key[k] for k in sorted(by_key, key=lambda k: (order[k[0]], cfg.s_values.index(k[1]), k[2]))]
    return ExperimentResult(cfg, records, aggregate(records))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def aggregates_path_for(path) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_aggregates{p.suffix or '.csv'}")


def emit_csv(records, aggregates, path) -> tuple[Path, Path]:
    """Write per-trial rows to `path` and aggregates to ``<stem>_aggregates.csv`` beside it."""
    path = Path(path)
    agg_path = aggregates_path_for(path)
    rec_rows = [
        [r.scheme, r.encoder, r.N, r.K, r.S, r.trial_index, r.seed, r.e_rel, r.e_rel_db, r.clamped_beta_flag]
        for r in records
    ]
    agg_rows = [[a.scheme, a.encoder, a.S, a.mean_e_rel, a.mean_db, a.std_db, a.trials] for a in aggregates]
    for target, header, rows in ((path, RECORD_HEADER, rec_rows), (agg_path, AGGREGATE_HEADER, agg_rows)):
        try:
            with open(target, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                w.writerows([_fmt(v) for v in row] for row in rows)
        except OSError as exc:
            raise IoError(target, exc.strerror or str(exc)) from exc
    return path, agg_path


def read_records_csv(path) -> list[TrialRecord]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return [
        TrialRecord(
            r["scheme"], r["encoder"], int(r["N"]), int(r["K"]), int(r["S"]), int(r["trial"]), int(r["seed"]),
            float(r["e_rel"]), float(r["e_rel_db"]), r["beta_clamped"] == "true",
        )
        for r in rows
    ]


def read_aggregates_csv(path) -> list[Aggregate]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return [
        Aggregate(r["scheme"], r["encoder"], int(r["S"]), float(r["mean_e_rel"]), float(r["mean_db"]),
                  float(r["std_db"]), int(r["trials"]))
        for r in rows
    ]


_CONFIG_KEYS = {f.name.lower(): f.name for f in fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key=value`` lines (``#`` comments) into an `ExperimentConfig`.

    List-valued keys (``s_values``, ``schemes``) take comma-separated values.
    Unknown or repeated keys are errors.
    """
    defaults = asdict(ExperimentConfig())
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        name = _CONFIG_KEYS.get(key.lower())
        if name is None:
            raise InvalidInput(f"line {lineno}: unknown key {key!r}")
        if name in values:
            raise InvalidInput(f"line {lineno}: duplicate key {key!r}")
        kind = type(defaults[name])
        try:
            if kind is tuple:
                items = [v.strip() for v in val.split(",") if v.strip()]
                values[name] = tuple(int(v) for v in items) if name == "s_values" else tuple(items)
            elif kind is int:
                values[name] = int(val, 0)
            elif kind is float:
                values[name] = float(val)
            else:
                values[name] = val
        except ValueError:
            raise InvalidInput(f"line {lineno}: bad value for {key!r}: {val!r}") from None
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return parse_config(text)


def panel_configs(trials: int = 1000, seed: int = 0, s_values=(0, 10, 20, 30, 40)) -> list[ExperimentConfig]:
    """The four encoder/function panels: N=100, K=8, 5x5 uniform [0, 1] blocks."""
    return [
        ExperimentConfig(N=100, K=8, s_values=tuple(s_values), trials=trials, seed=seed, encoder=enc, function=fn)
        for enc in (LAGRANGE, BERRUT)
        for fn in ("xsinx", "sigmoid")
    ]
