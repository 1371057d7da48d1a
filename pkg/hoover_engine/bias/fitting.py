"""
Maximum likelihood fits for the three families.

Gamma has no closed form for the shape: α̂ solves
    ln α - ψ(α) = ln X̄ - mean(ln X)
by Newton's method kept inside a bracket, with bisection whenever a
Newton step would leave it. The rate follows as λ̂ = α̂ / X̄.
Poisson and geometric fits are closed forms of the sample mean.
"""

import logging
import math
from typing import Optional

import numpy as np

from ..core import specnum
from ..core.distributions import DistributionSpec, Family
from ..core.estimators import Sample
from ..core.specnum import DomainError, NonConvergenceError
from .models import FitResult

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100
# ln X̄ - mean(ln X) below this means the sample is constant to rounding
DEGENERATE_SPREAD = 1e-14


class FittingError(ValueError):
    """Raised when a sample cannot be fitted."""

    def __init__(self, message: str, family: Optional[Family] = None):
        self.message = message
        self.family = family
        super().__init__(message)

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "type": type(self).__name__,
            "field": "sample",
            "message": self.message,
            "family": self.family.value if self.family else None,
        }


class DegenerateSampleError(FittingError):
    """The likelihood has no finite maximizer (constant or all-zero sample)."""


def _require_integers(s: Sample, family: Family) -> None:
    if not s.is_integer_valued:
        raise DomainError(f"fit_{family.value}_ml", "sample must be integer-valued", s.values.tolist()[:5])


# =============================================================================
# Gamma
# =============================================================================

def gamma_loglik(alpha: float, s: Sample) -> float:
    """Profile log-likelihood of the shape, with λ = α / X̄."""
    n = s.n
    mean_x = s.mean
    mean_log = float(np.mean(np.log(s.values)))
    return n * (alpha * math.log(alpha / mean_x) - specnum.log_gamma(alpha) + (alpha - 1.0) * mean_log - alpha)


def _shape_score(alpha: float, spread: float) -> float:
    return math.log(alpha) - specnum.digamma(alpha) - spread


def _bracket(alpha: float, spread: float) -> tuple[float, float]:
    # the score decreases from +∞ to -spread, so halving/doubling always brackets
    lo = hi = alpha
    while _shape_score(lo, spread) <= 0.0:
        lo *= 0.5
    while _shape_score(hi, spread) >= 0.0:
        hi *= 2.0
    return lo, hi


def fit_gamma_ml(s: Sample, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> FitResult:
    """
    Gamma(α̂, λ̂) maximum likelihood fit.

    Raises:
        DomainError: if any value is 0 (the likelihood needs positive data)
        DegenerateSampleError: if the sample is constant
        NonConvergenceError: if max_iter steps do not reach |score| ≤ tol
    """
    if np.any(s.values <= 0):
        raise DomainError("fit_gamma_ml", "gamma fitting needs strictly positive values", 0.0)

    mean_x = s.mean
    spread = math.log(mean_x) - float(np.mean(np.log(s.values)))
    if not spread >= DEGENERATE_SPREAD:
        raise DegenerateSampleError("constant sample: the gamma shape estimate diverges", Family.GAMMA)

    alpha = 0.5 / spread
    lo, hi = _bracket(alpha, spread)
    alpha = min(max(alpha, lo), hi)

    for iteration in range(1, max_iter + 1):
        score = _shape_score(alpha, spread)
        if abs(score) <= tol:
            logger.debug("gamma fit converged: alpha=%.12g after %d steps", alpha, iteration - 1)
            return FitResult(
                spec=DistributionSpec.gamma(alpha, alpha / mean_x),
                loglik=gamma_loglik(alpha, s),
                iterations=iteration - 1,
                converged=True,
            )

        if score > 0.0:
            lo = alpha
        else:
            hi = alpha

        slope = 1.0 / alpha - specnum.trigamma(alpha)
        step = alpha - score / slope
        alpha = step if lo < step < hi else 0.5 * (lo + hi)

    raise NonConvergenceError(
        "gamma shape iteration did not converge",
        estimate=alpha,
        err_est=abs(_shape_score(alpha, spread)),
        diagnostics={"iterations": max_iter, "bracket": [lo, hi]},
    )


# =============================================================================
# Discrete families
# =============================================================================

def fit_poisson_ml(s: Sample) -> FitResult:
    """λ̂ = X̄."""
    _require_integers(s, Family.POISSON)
    lam = s.mean
    if lam == 0.0:
        raise DegenerateSampleError("all-zero sample: the Poisson mean estimate is 0", Family.POISSON)

    total = s.total
    loglik = total * math.log(lam) - s.n * lam - float(np.sum(specnum.log_gamma(s.values + 1.0)))
    return FitResult(DistributionSpec.poisson(lam), loglik)


def fit_geometric_ml(s: Sample) -> FitResult:
    """p̂ = 1 / (1 + X̄)."""
    _require_integers(s, Family.GEOMETRIC)
    mean_x = s.mean
    if mean_x == 0.0:
        raise DegenerateSampleError("all-zero sample: the geometric p estimate is 1", Family.GEOMETRIC)

    p = 1.0 / (1.0 + mean_x)
    loglik = s.n * math.log(p) + s.total * math.log1p(-p)
    return FitResult(DistributionSpec.geometric(p), loglik)


def fit_ml(s: Sample, family: Family) -> FitResult:
    """Fit the named family; the family is never inferred from the data."""
    if family is Family.GAMMA:
        return fit_gamma_ml(s)
    if family is Family.POISSON:
        return fit_poisson_ml(s)
    return fit_geometric_ml(s)
