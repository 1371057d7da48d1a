"""
Plug-in bias correction: Ĥᶜ = Ĥ - Bias_n(θ̂) with θ̂ the maximum likelihood fit.
"""

import logging
from typing import Callable, Optional

from ..core.distributions import DistributionSpec, Family
from ..core.estimators import Sample, hoover_hat
from ..core.specnum import QuadratureConfig, SeriesConfig
from .finite_sample import bias
from .fitting import fit_ml
from .models import CorrectedEstimate

logger = logging.getLogger(__name__)

BiasFunction = Callable[[DistributionSpec, int], float]


def correct_hoover(
    s: Sample,
    family: Family,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
    *,
    bias_fn: Optional[BiasFunction] = None,
) -> CorrectedEstimate:
    """
    Fit family by ML and subtract the analytic bias at the fitted parameter.

    bias_fn(spec, n) replaces the exact bias evaluation (the simulation
    harness passes an interpolant here). The corrected value is reported
    as-is, even outside [0, 1 - 1/n].
    """
    raw = hoover_hat(s)
    fit = fit_ml(s, family)

    if bias_fn is None:
        estimate = bias(fit.spec, s.n, qcfg, scfg).bias
    else:
        estimate = bias_fn(fit.spec, s.n)

    corrected = raw - estimate
    out_of_range = not 0.0 <= corrected <= 1.0 - 1.0 / s.n
    if out_of_range:
        logger.warning("corrected estimate %.6g lies outside [0, 1 - 1/%d]", corrected, s.n)

    return CorrectedEstimate(
        raw=raw,
        bias_estimate=estimate,
        corrected=corrected,
        fit=fit,
        n=s.n,
        out_of_range=out_of_range,
    )
