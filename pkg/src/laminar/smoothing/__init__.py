"""C1 approximation of partially smooth functions on a holomorphic lamination."""

from .approximant import (Approximant, PartiallySmoothFn, exact_approximant, kinked_composite,
                          leaf_coordinate, smooth_composite)
from .chart import GridSpec, LeafChart
from .heights import (QuadFrame, glue_heights, leaf_constant_approximant, leaf_parameter, local_height,
                      measure_gradient_constant, measure_plateau_band, normalized_w,
                      quadrilateral_overlap_count)
from .interpolation import bump_interpolant
from .metrics import (ZERO_FLOOR, ErrorReport, SweepResult, convergence_sweep, error_report, fit_rate,
                      leafwise_derivative, rate_model, sample_chart_points)
from .patching import (LocalPiece, PatchedApproximant, epsilon_budget, global_approximant, hex_cover,
                       partition_patch, partition_weights)
from .profiles import BumpLambda, cutoff_chi, glue_ramp, smoothstep

__all__ = [
    "Approximant", "PartiallySmoothFn", "exact_approximant", "kinked_composite", "leaf_coordinate",
    "smooth_composite", "GridSpec", "LeafChart", "QuadFrame", "glue_heights", "leaf_constant_approximant",
    "leaf_parameter", "local_height", "measure_gradient_constant", "measure_plateau_band", "normalized_w",
    "quadrilateral_overlap_count", "bump_interpolant", "ZERO_FLOOR", "ErrorReport", "SweepResult", "convergence_sweep",
    "error_report", "fit_rate", "leafwise_derivative", "rate_model", "sample_chart_points", "LocalPiece",
    "PatchedApproximant", "epsilon_budget", "global_approximant", "hex_cover", "partition_patch",
    "partition_weights", "BumpLambda", "cutoff_chi", "glue_ramp", "smoothstep",
]
