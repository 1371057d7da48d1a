"""
Core modules for the Hoover engine.

- validation: field-level input checks and ValidationError
- specnum: special functions, quadrature and series summation
- distributions: gamma/Poisson/geometric specs, CDFs, seeded sampling
- hoover: population Hoover index (closed forms and generic forms), gamma Gini
- estimators: Sample, Ĥ and Ĝ
"""

from .validation import ValidationError, ValidationResult
from .specnum import (
    DomainError,
    NonConvergenceError,
    QuadratureConfig,
    QuadratureResult,
    SeriesConfig,
    SeriesSum,
    digamma,
    integrate_finite,
    integrate_semi_infinite,
    log_gamma,
    reg_gamma_lower,
    reg_gamma_upper,
    reg_inc_beta,
    sum_series,
    trigamma,
)
from .distributions import (
    DistributionSpec,
    Family,
    Seed,
    cdf,
    density,
    format_spec,
    laplace_transform,
    mean,
    parse_spec,
    sample,
    sample_matrix,
    tilt,
    validate_spec,
    variance,
)
from .hoover import (
    IndexMethod,
    IndexValue,
    gini_gamma,
    hoover_closed,
    hoover_generic_continuous,
    hoover_generic_discrete,
    hoover_index,
)
from .estimators import Sample, gini_hat, gini_hat_rows, hoover_hat, hoover_hat_rows

__all__ = [
    # Validation
    "ValidationError",
    "ValidationResult",
    # Numerics
    "DomainError",
    "NonConvergenceError",
    "QuadratureConfig",
    "QuadratureResult",
    "SeriesConfig",
    "SeriesSum",
    "digamma",
    "integrate_finite",
    "integrate_semi_infinite",
    "log_gamma",
    "reg_gamma_lower",
    "reg_gamma_upper",
    "reg_inc_beta",
    "sum_series",
    "trigamma",
    # Distributions
    "DistributionSpec",
    "Family",
    "Seed",
    "cdf",
    "density",
    "format_spec",
    "laplace_transform",
    "mean",
    "parse_spec",
    "sample",
    "sample_matrix",
    "tilt",
    "validate_spec",
    "variance",
    # Population index
    "IndexMethod",
    "IndexValue",
    "gini_gamma",
    "hoover_closed",
    "hoover_generic_continuous",
    "hoover_generic_discrete",
    "hoover_index",
    # Estimators
    "Sample",
    "gini_hat",
    "gini_hat_rows",
    "hoover_hat",
    "hoover_hat_rows",
]
