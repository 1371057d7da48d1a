"""
Bias Engine - finite-sample behaviour of the Hoover estimator.

- finite_sample: exact E[Ĥ] and Bias(Ĥ, H) for gamma/Poisson/geometric,
  analytic bounds and Monte Carlo oracles
- fitting: maximum likelihood fits feeding the plug-in correction
- correction: Ĥᶜ = Ĥ - Bias_n(θ̂)

Usage:
    from hoover_engine.core import DistributionSpec
    from hoover_engine.bias import bias

    report = bias(DistributionSpec.gamma(1.0), n=25)
    print(report.bias)
"""

from .models import (
    BiasReport,
    CorrectedEstimate,
    ExpectationResult,
    FitResult,
    MonteCarloEstimate,
)
from .finite_sample import (
    bias,
    bias_curve,
    expected_hoover,
    expected_hoover_gamma,
    expected_hoover_geometric,
    expected_hoover_poisson,
    min_integral_gamma,
    min_tilted_oracle,
    simulate_hoover_mean,
    upper_bound_expectation,
)
from .fitting import (
    DegenerateSampleError,
    FittingError,
    fit_gamma_ml,
    fit_geometric_ml,
    fit_ml,
    fit_poisson_ml,
    gamma_loglik,
)
from .correction import correct_hoover

__all__ = [
    # Models
    "BiasReport",
    "CorrectedEstimate",
    "ExpectationResult",
    "FitResult",
    "MonteCarloEstimate",
    # Expectation and bias
    "bias",
    "bias_curve",
    "expected_hoover",
    "expected_hoover_gamma",
    "expected_hoover_geometric",
    "expected_hoover_poisson",
    "min_integral_gamma",
    "min_tilted_oracle",
    "simulate_hoover_mean",
    "upper_bound_expectation",
    # Fitting
    "DegenerateSampleError",
    "FittingError",
    "fit_gamma_ml",
    "fit_geometric_ml",
    "fit_ml",
    "fit_poisson_ml",
    "gamma_loglik",
    # Correction
    "correct_hoover",
]
