"""
Sample Hoover and Gini estimators.

Both estimators sort the sample first so the result depends only on the
multiset of values, never on their order.
"""

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .specnum import DomainError
from .validation import ValidationError


@dataclass(frozen=True)
class Sample:
    """
    Observed values X_1..X_n.

    Values are stored as a read-only float array. Requires n ≥ 2 and every
    value finite and non-negative; negative values are rejected, never
    clamped.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        try:
            values = np.array(self.values, dtype=float).ravel()
        except (TypeError, ValueError):
            raise ValidationError("sample", "Values must be numbers", self.values)

        if values.size < 2:
            raise ValidationError("sample", "Need at least 2 observations", int(values.size))
        if not np.all(np.isfinite(values)):
            raise ValidationError("sample", "Values must be finite", values[~np.isfinite(values)][0])
        if np.any(values < 0):
            raise ValidationError("sample", "Values must be non-negative", float(values[values < 0][0]))

        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, values: Iterable[float]) -> "Sample":
        return cls(np.fromiter(values, dtype=float))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def total(self) -> float:
        return float(np.sum(np.sort(self.values)))

    @property
    def mean(self) -> float:
        return self.total / self.n

    @property
    def is_integer_valued(self) -> bool:
        return bool(np.all(self.values == np.floor(self.values)))

    def scaled(self, factor: float) -> "Sample":
        return Sample(self.values * factor)

    def __len__(self) -> int:
        return self.n

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {"n": self.n, "values": self.values.tolist()}


def _spread_weights(n: int) -> np.ndarray:
    # Σ_{i<j} |X_i - X_j| = Σ_k (2k - n - 1) X_(k) over the sorted sample
    return 2.0 * np.arange(1, n + 1) - n - 1.0


def hoover_hat(s: Sample) -> float:
    """
    Ĥ = ½ Σ|X_i - X̄| / ΣX_i, or 0 when the sample sums to 0.

    Lies in [0, 1 - 1/n].
    """
    ordered = np.sort(s.values)
    total = float(np.sum(ordered))
    if total == 0.0:
        return 0.0

    if s.n == 2:
        # shares its arithmetic with gini_hat so Ĥ = Ĝ/2 holds exactly
        return 0.5 * (float(np.dot(_spread_weights(2), ordered)) / total)

    deviations = np.abs(ordered - total / s.n)
    return 0.5 * float(np.sum(deviations)) / total


def gini_hat(s: Sample) -> float:
    """
    Ĝ = Σ_{i<j} |X_i - X_j| / ((n - 1) ΣX_i), via the sorted O(n log n) form.

    Raises:
        DomainError: if the sample sums to 0
    """
    ordered = np.sort(s.values)
    total = float(np.sum(ordered))
    if total == 0.0:
        raise DomainError("gini_hat", "undefined for a sample summing to 0", 0.0)
    return (float(np.dot(_spread_weights(s.n), ordered)) / total) / (s.n - 1)


# =============================================================================
# Batch forms (one sample per row)
# =============================================================================

def hoover_hat_rows(matrix: np.ndarray) -> np.ndarray:
    """Ĥ for every row of a reps × n array."""
    ordered = np.sort(np.asarray(matrix, dtype=float), axis=1)
    n = ordered.shape[1]
    totals = np.sum(ordered, axis=1)
    safe = np.where(totals > 0, totals, 1.0)
    if n == 2:
        spread = ordered @ _spread_weights(2)
        values = 0.5 * (spread / safe)
    else:
        deviations = np.abs(ordered - (totals / n)[:, None])
        values = 0.5 * np.sum(deviations, axis=1) / safe
    return np.where(totals > 0, values, 0.0)


def gini_hat_rows(matrix: np.ndarray) -> np.ndarray:
    """Ĝ for every row; rows summing to 0 give 0, the same convention as Ĥ."""
    ordered = np.sort(np.asarray(matrix, dtype=float), axis=1)
    n = ordered.shape[1]
    totals = np.sum(ordered, axis=1)
    safe = np.where(totals > 0, totals, 1.0)
    values = ((ordered @ _spread_weights(n)) / safe) / (n - 1)
    return np.where(totals > 0, values, 0.0)
