"""B-spline assisted coded computing.

Encode a matrix dataset for ``N`` simulated workers, let some of them
straggle, and reconstruct entrywise function values at the master with a
natural cubic B-spline interpolant (or the Berrut rational baseline).
"""

from . import banded, bounds, coded_pipeline, experiments, spline_core, spline_fit
from .banded import BandedLU, BandedMatrix, banded_lu_factor, bandwidth_profile
from .bounds import (
    BoundInputs,
    KnotSpacingStats,
    bacc_bound,
    bscc_cheby_bound,
    corollary_bound,
    decay_slope,
    estimate_fourth_derivative_sup,
    knot_spacing_stats,
    operator_norm_upper_bound,
    theorem2_bound,
)
from .coded_pipeline import (
    Dataset,
    EncodingConfig,
    Share,
    TargetFunction,
    WorkerResult,
    bacc_reconstruct,
    berrut_basis,
    bscc_reconstruct,
    chebyshev_nodes_first_kind,
    chebyshev_nodes_second_kind,
    encode,
    get_target_function,
    lagrange_basis,
    make_shares,
    run_workers,
    worker_eval,
)
from .errors import *  # noqa: F401,F403
from .experiments import ExperimentConfig, TrialRecord, emit_csv, relative_error, run_experiment, run_trial
from .spline_core import (
    BasisIndexRange,
    KnotVector,
    active_basis_range,
    basis_second_derivative,
    basis_value,
    eval_spline,
    make_clamped_knots,
)
from .spline_fit import CubicSplineInterpolant, build_rect_matrix, build_square_system, fit_natural_cubic

__version__ = "0.1.0"
