"""Condensed-density estimation for zeros and poles of Cauchy transforms.

A finite atomic measure on the unit disk is observed only through noisy
complex moments.  This package turns such moment data into estimates of
where the zeros (or poles) of the measure's Cauchy transform concentrate:
the reciprocal-moment transform maps zero problems to pole problems, Hankel
matrix pencils localize the points, Laguerre series approximate the law of
the pencil's QR diagonal, and a digamma/discrete-Laplacian estimator maps
the condensed density on a lattice.
"""

from .condensed import (
    CondensedEstimate,
    DensityGrid,
    EstimatorConfig,
    GridSpec,
    ModeShortfallWarning,
    NormalizationError,
    default_grid,
    discrete_laplacian,
    estimate_condensed,
    extract_modes,
    normalize,
    potential_field,
    read_grid_csv,
    write_grid_csv,
    write_grid_pgm,
)
from .laguerre import (
    EmpiricalMoments,
    GammaFit,
    LaguerreExpansion,
    UnderdispersedMomentsError,
    density_eval,
    expansion_coefficients,
    expected_log,
    fit_gamma,
    histogram_l2,
    read_expansion_csv,
    write_expansion_csv,
)
from .measure import (
    AtomicMeasure,
    DegreeDropWarning,
    MomentSequence,
    NoiseModel,
    PoleEvaluationError,
    cauchy_poles,
    cauchy_transform,
    cauchy_zeros,
    demo_measure,
    exact_moments,
    read_measure_file,
    sample_moment_stack,
    sample_moments,
    write_measure_file,
)
from .pencil import (
    HankelPencil,
    QRDiagonal,
    SingularPencilError,
    build_pencil,
    default_order,
    diagonal_samples,
    generalized_eigenvalues,
    qr_diagonal,
    qr_diagonal_many,
)
from .specfun import (
    LaguerrePolynomial,
    digamma,
    laguerre_eval,
    laguerre_polynomial,
    log_gamma,
)
from .transform import (
    IllConditionedTransformError,
    PushforwardDensity,
    gaussian_approximation,
    log_gaussian_approximation,
    log_pushforward_density,
    pushforward_density,
    read_moment_csv,
    reciprocal_coefficients,
    reciprocal_entry_determinant,
    reciprocal_moments,
    toeplitz_lower_triangular,
    write_moment_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # measure
    "AtomicMeasure", "MomentSequence", "NoiseModel",
    "PoleEvaluationError", "DegreeDropWarning",
    "exact_moments", "sample_moments", "sample_moment_stack",
    "cauchy_transform", "cauchy_zeros", "cauchy_poles",
    "read_measure_file", "write_measure_file", "demo_measure",
    # transform
    "IllConditionedTransformError", "PushforwardDensity",
    "reciprocal_coefficients", "reciprocal_moments",
    "reciprocal_entry_determinant", "toeplitz_lower_triangular",
    "pushforward_density", "log_pushforward_density",
    "gaussian_approximation", "log_gaussian_approximation",
    "read_moment_csv", "write_moment_csv",
    # pencil
    "HankelPencil", "QRDiagonal", "SingularPencilError",
    "build_pencil", "default_order", "qr_diagonal", "qr_diagonal_many",
    "diagonal_samples", "generalized_eigenvalues",
    # laguerre
    "EmpiricalMoments", "GammaFit", "LaguerreExpansion",
    "UnderdispersedMomentsError", "fit_gamma", "expansion_coefficients",
    "density_eval", "expected_log", "histogram_l2",
    "read_expansion_csv", "write_expansion_csv",
    # condensed
    "GridSpec", "DensityGrid", "EstimatorConfig", "CondensedEstimate",
    "NormalizationError", "ModeShortfallWarning",
    "default_grid", "potential_field", "discrete_laplacian", "normalize",
    "estimate_condensed", "extract_modes",
    "read_grid_csv", "write_grid_csv", "write_grid_pgm",
    # specfun
    "log_gamma", "digamma", "laguerre_eval",
    "laguerre_polynomial", "LaguerrePolynomial",
]
