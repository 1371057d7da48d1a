"""
Simulation Study - Data Models.

Configuration of a Monte Carlo grid and the per-cell summary it produces.
"""

import math
import os
from dataclasses import dataclass, field
from typing import Optional

from ..core.distributions import DistributionSpec, Seed, format_spec
from ..core.validation import ValidationError, ValidationResult, check_count

WORKERS_ENV = "INEQ_WORKERS"

# CSV column order; downstream plot scripts rely on it
CELL_COLUMNS = [
    "family",
    "params",
    "n",
    "R",
    "seed",
    "H_true",
    "relbias_raw",
    "relbias_corr",
    "rmse_raw",
    "rmse_corr",
    "se_relbias_raw",
    "se_relbias_corr",
    "failures",
]


def default_workers() -> int:
    """Worker count from INEQ_WORKERS, else 1."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValidationError(WORKERS_ENV, "Must be an integer", raw)
    if workers < 1:
        raise ValidationError(WORKERS_ENV, "Must be at least 1", workers)
    return workers


@dataclass
class SimulationConfig:
    """A grid of populations × sample sizes, each replicated R times."""

    specs: list[DistributionSpec]
    sample_sizes: list[int]
    replications: int
    seed: Seed
    apply_correction: bool = True
    exact_bias: bool = False  # exact bias per replication instead of the interpolant
    workers: int = field(default_factory=default_workers)
    compute_expectation: bool = True  # attach exact E[Ĥ] to every cell

    def __post_init__(self) -> None:
        validate_simulation_config(self).raise_first()

    @property
    def cell_count(self) -> int:
        return len(self.specs) * len(self.sample_sizes)

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "specs": [format_spec(spec) for spec in self.specs],
            "sample_sizes": list(self.sample_sizes),
            "replications": self.replications,
            "seed": self.seed.value,
            "apply_correction": self.apply_correction,
            "exact_bias": self.exact_bias,
            "workers": self.workers,
            "compute_expectation": self.compute_expectation,
        }


def validate_simulation_config(cfg: SimulationConfig) -> ValidationResult:
    """Check grid and replication constraints without raising."""
    errors: list[ValidationError] = []
    warnings: list[str] = []

    if not cfg.specs:
        errors.append(ValidationError("specs", "At least one distribution is required", cfg.specs))
    if not cfg.sample_sizes:
        errors.append(ValidationError("sample_sizes", "At least one sample size is required", cfg.sample_sizes))
    for n in cfg.sample_sizes:
        check_count(errors, "sample_sizes", n, 2)
    check_count(errors, "replications", cfg.replications, 2)
    check_count(errors, "workers", cfg.workers, 1)

    if len(set(cfg.sample_sizes)) != len(cfg.sample_sizes):
        warnings.append("Duplicate sample sizes produce duplicate cells")
    if cfg.exact_bias and not cfg.apply_correction:
        warnings.append("exact_bias has no effect without apply_correction")

    return ValidationResult(is_valid=len(errors) == 0, errors=errors, warnings=warnings)


@dataclass
class SimulationCell:
    """
    Summary of one (population, n) cell.

    Raw metrics cover all R replications. Corrected metrics cover the
    replications whose fit and bias evaluation succeeded; `failures` counts
    the rest. A cell that could not be computed at all carries `error` and
    NaN metrics.
    """

    spec: DistributionSpec
    n: int
    R: int
    seed: int
    cell_index: int = 0
    H_true: float = math.nan
    relbias_raw: float = math.nan
    relbias_corr: float = math.nan
    rmse_raw: float = math.nan
    rmse_corr: float = math.nan
    se_relbias_raw: float = math.nan
    se_relbias_corr: float = math.nan
    failures: int = 0

    # Diagnostics (JSON output only)
    mean_raw: float = math.nan
    mean_corr: float = math.nan
    se_mean_raw: float = math.nan
    expected_H_hat: Optional[float] = None
    elapsed: float = 0.0
    error: Optional[str] = None

    @property
    def succeeded(self) -> int:
        return self.R - self.failures

    def row(self) -> dict:
        """Values keyed by CELL_COLUMNS."""
        params = ";".join(f"{name}={value!r}" for name, value in self.spec.params.items())
        return {
            "family": self.spec.family.value,
            "params": params,
            "n": self.n,
            "R": self.R,
            "seed": self.seed,
            "H_true": self.H_true,
            "relbias_raw": self.relbias_raw,
            "relbias_corr": self.relbias_corr,
            "rmse_raw": self.rmse_raw,
            "rmse_corr": self.rmse_corr,
            "se_relbias_raw": self.se_relbias_raw,
            "se_relbias_corr": self.se_relbias_corr,
            "failures": self.failures,
        }

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        data = self.row()
        data.update(
            {
                "dist": format_spec(self.spec),
                "cell_index": self.cell_index,
                "mean_raw": self.mean_raw,
                "mean_corr": self.mean_corr,
                "se_mean_raw": self.se_mean_raw,
                "expected_H_hat": self.expected_H_hat,
                "elapsed": self.elapsed,
                "error": self.error,
            }
        )
        return data
