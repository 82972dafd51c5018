"""Truncated Wasserstein tools for power-tail jump noise."""

__version__ = "0.1.0"

from .coupling import (
    EXACT_CONSTANTS,
    BoundConstants,
    LevyTriplet,
    coupling_distance,
    coupling_semimetric,
    theorem_bound,
)
from .errors import InfiniteSecondMomentError, QuadratureError
from .estimator import (
    DistanceCurve,
    IncrementSeries,
    SweepResult,
    cutoff_sweep,
    distance_curve,
    extract_increments,
    min_distance_estimator,
    model_distance_bound,
    nondimensionalize,
    split_tails,
)
from .measures import (
    GaussianJumpLaw,
    PowerLawTail,
    StableTailMeasure,
    cutoff_for_intensity,
    normalized_tail,
    small_jump_variance,
    tail_mass,
)
from .references import EmpiricalQuantile, PowerLawQuantile, TwoSidedQuantile, partial_integrals, point_mass
from .simulate import (
    ConvergenceReport,
    SimulationConfig,
    convergence_experiment,
    render_cpp_path,
    sample_gaussian_jumps,
    sample_power_law_jumps,
)
from .wasserstein import (
    OrderedSample,
    empirical_w2_squared,
    empirical_w2_truncated,
    measure_distance_truncated,
    quadrature_w2_truncated,
)

__all__ = [
    "__version__",
    "EXACT_CONSTANTS",
    "BoundConstants",
    "LevyTriplet",
    "coupling_distance",
    "coupling_semimetric",
    "theorem_bound",
    "InfiniteSecondMomentError",
    "QuadratureError",
    "DistanceCurve",
    "IncrementSeries",
    "SweepResult",
    "cutoff_sweep",
    "distance_curve",
    "extract_increments",
    "min_distance_estimator",
    "model_distance_bound",
    "nondimensionalize",
    "split_tails",
    "GaussianJumpLaw",
    "PowerLawTail",
    "StableTailMeasure",
    "cutoff_for_intensity",
    "normalized_tail",
    "small_jump_variance",
    "tail_mass",
    "EmpiricalQuantile",
    "PowerLawQuantile",
    "TwoSidedQuantile",
    "partial_integrals",
    "point_mass",
    "ConvergenceReport",
    "SimulationConfig",
    "convergence_experiment",
    "render_cpp_path",
    "sample_gaussian_jumps",
    "sample_power_law_jumps",
    "OrderedSample",
    "empirical_w2_squared",
    "empirical_w2_truncated",
    "measure_distance_truncated",
    "quadrature_w2_truncated",
]
