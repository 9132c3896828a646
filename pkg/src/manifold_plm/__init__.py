"""Partially linear regression with a manifold-valued smoothing covariate.

The model is ``y = x' beta + g(t) + eps`` where ``t`` lives on a sphere, a
cylinder or a Euclidean space. Kernel smoothing uses geodesic distances
with a volume-density correction; ``beta`` comes from least squares on the
smoothing residuals, with Wald-type inference and cross-validated bandwidth
selection. A Monte Carlo harness verifies the estimator on synthetic
designs, and an HTTP service plus a thin CLI expose the functionality.
"""

__version__ = "0.1.0"

from .bandwidth import (
    BandwidthGrid,
    BandwidthScore,
    SelectionResult,
    cv_score,
    default_grid,
    prediction_error_ep,
    select_cv,
    sv_score,
)
from .exceptions import (
    CollinearDesignError,
    CsvFormatError,
    EmptyNeighborhoodError,
    FitUndefinedError,
    InfeasibleBandwidthError,
    InjectivityDomainError,
    InvalidPointError,
    ManifoldPlmError,
    NoFeasibleBandwidthError,
    UnstableDesignError,
)
from .geometry import Cylinder, Euclidean, Manifold, Sphere
from .plm import (
    Dataset,
    PlmFit,
    center_covariates,
    estimate_g,
    estimate_g_many,
    fit_beta,
    g_at_sample,
    predict_many,
    wald_test,
)
from .simulation import (
    McSummary,
    SimDesign,
    gen_cylinder_dataset,
    gen_sphere_dataset,
    monte_carlo,
    run_replication,
    sample_von_mises,
)
from .smoothing import (
    QuadraticKernel,
    SmootherConfig,
    density_estimate,
    kernel_eval,
    loo_regress,
    normalized_weights,
    nw_regress,
    raw_weights,
)

__all__ = [
    "BandwidthGrid",
    "BandwidthScore",
    "CollinearDesignError",
    "CsvFormatError",
    "Cylinder",
    "Dataset",
    "EmptyNeighborhoodError",
    "Euclidean",
    "FitUndefinedError",
    "InfeasibleBandwidthError",
    "InjectivityDomainError",
    "InvalidPointError",
    "Manifold",
    "ManifoldPlmError",
    "McSummary",
    "NoFeasibleBandwidthError",
    "PlmFit",
    "QuadraticKernel",
    "SelectionResult",
    "SimDesign",
    "SmootherConfig",
    "Sphere",
    "UnstableDesignError",
    "center_covariates",
    "cv_score",
    "default_grid",
    "density_estimate",
    "estimate_g",
    "estimate_g_many",
    "fit_beta",
    "g_at_sample",
    "gen_cylinder_dataset",
    "gen_sphere_dataset",
    "kernel_eval",
    "loo_regress",
    "monte_carlo",
    "normalized_weights",
    "nw_regress",
    "predict_many",
    "prediction_error_ep",
    "raw_weights",
    "run_replication",
    "sample_von_mises",
    "select_cv",
    "sv_score",
    "wald_test",
]
