"""
Bias Engine - Data Models.

Result types for finite-sample expectations, bias reports, maximum
likelihood fits and corrected estimates.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from ..core.distributions import DistributionSpec


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class ExpectationResult:
    """
    Exact E[Ĥ] for one population and sample size.

    value lies in [0, upper_bound], the family's analytic ceiling.
    """

    value: float
    err_est: float
    n: int
    upper_bound: float
    inner_diag: dict = field(default_factory=dict)  # cutoffs, series lengths, evaluations

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "expected_H_hat": self.value,
            "err_est": self.err_est,
            "n": self.n,
            "upper_bound": self.upper_bound,
            "diagnostics": self.inner_diag,
        }


@dataclass(frozen=True)
class BiasReport:
    """Bias(Ĥ, H) = E[Ĥ] - H with the family's analytic bias bounds."""

    spec: DistributionSpec
    n: int
    H: float
    expected_H_hat: float
    bias: float
    lower_bound: float
    upper_bound: float
    err_est: float = 0.0

    @property
    def relative_bias(self) -> float:
        return self.bias / self.H

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "dist": str(self.spec),
            "n": self.n,
            "H": self.H,
            "expected_H_hat": self.expected_H_hat,
            "bias": self.bias,
            "relative_bias": self.relative_bias,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "err_est": self.err_est,
        }


class MonteCarloEstimate(NamedTuple):
    """Simulated mean with its standard error."""

    mean: float
    se: float
    reps: int

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {"mc_mean": self.mean, "mc_se": _finite_or_none(self.se), "reps": self.reps}


@dataclass(frozen=True)
class FitResult:
    """A maximum likelihood fit."""

    spec: DistributionSpec
    loglik: float
    iterations: int = 0
    converged: bool = True

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "dist": str(self.spec),
            "params": self.spec.params,
            "loglik": self.loglik,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class CorrectedEstimate:
    """
    Ĥᶜ = Ĥ - Bias_n(θ̂).

    corrected is never clamped; out_of_range flags values outside
    [0, 1 - 1/n].
    """

    raw: float
    bias_estimate: float
    corrected: float
    fit: FitResult
    n: int
    out_of_range: bool = False

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "hoover_hat": self.raw,
            "bias_estimate": self.bias_estimate,
            "corrected": self.corrected,
            "n": self.n,
            "out_of_range": self.out_of_range,
            "fit": self.fit.to_dict(),
        }
