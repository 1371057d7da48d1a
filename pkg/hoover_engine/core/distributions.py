"""
Population Families - Specs, Moments and Sampling.

Describes the three populations the engine works with:
- Gamma(shape α, rate λ) on [0, ∞)
- Poisson(λ) on {0, 1, ...}
- Geometric(p) on {0, 1, ...} (number of failures before a success)

Every spec is validated on construction. Random draws are addressed by a
(seed, stream) pair so a replication always sees the same numbers,
whatever order or process it runs in.
"""

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from . import specnum
from .validation import (
    ValidationError,
    ValidationResult,
    check_count,
    check_open_unit,
    check_positive,
)


class Family(Enum):
    """Supported population families."""

    GAMMA = "gamma"
    POISSON = "poisson"
    GEOMETRIC = "geometric"

    @property
    def is_discrete(self) -> bool:
        return self is not Family.GAMMA


def _coerce(value: Any) -> Any:
    try:
        return float(value)
    except (TypeError, ValueError):
        return value


@dataclass(frozen=True)
class DistributionSpec:
    """
    A validated population description.

    Only the parameters of the chosen family are set; the others stay None.
    For Poisson, `rate` holds the mean λ.
    """

    family: Family
    alpha: Optional[float] = None  # gamma shape
    rate: Optional[float] = None  # gamma rate / Poisson mean
    p: Optional[float] = None  # geometric success probability

    def __post_init__(self) -> None:
        validate_spec(self).raise_first()

    @classmethod
    def gamma(cls, alpha: float, rate: float = 1.0) -> "DistributionSpec":
        return cls(Family.GAMMA, alpha=_coerce(alpha), rate=_coerce(rate))

    @classmethod
    def poisson(cls, lam: float) -> "DistributionSpec":
        return cls(Family.POISSON, rate=_coerce(lam))

    @classmethod
    def geometric(cls, p: float) -> "DistributionSpec":
        return cls(Family.GEOMETRIC, p=_coerce(p))

    @property
    def parameter(self) -> float:
        """The parameter that drives H and E[Ĥ] (α, λ or p)."""
        if self.family is Family.GAMMA:
            return self.alpha
        if self.family is Family.POISSON:
            return self.rate
        return self.p

    @property
    def params(self) -> dict:
        if self.family is Family.GAMMA:
            return {"alpha": self.alpha, "rate": self.rate}
        if self.family is Family.POISSON:
            return {"lambda": self.rate}
        return {"p": self.p}

    def with_parameter(self, value: float) -> "DistributionSpec":
        """Same family with the driving parameter replaced (gamma keeps its rate)."""
        if self.family is Family.GAMMA:
            return DistributionSpec.gamma(value, self.rate)
        if self.family is Family.POISSON:
            return DistributionSpec.poisson(value)
        return DistributionSpec.geometric(value)

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {"family": self.family.value, **self.params, "text": format_spec(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "DistributionSpec":
        """Create from dictionary representation."""
        if "text" in data:
            return parse_spec(data["text"])
        try:
            family = Family(data.get("family"))
        except ValueError:
            raise ValidationError("family", "Unknown family", data.get("family"))
        if family is Family.GAMMA:
            return cls.gamma(data.get("alpha"), data.get("rate", 1.0))
        if family is Family.POISSON:
            return cls.poisson(data.get("lambda", data.get("rate")))
        return cls.geometric(data.get("p"))

    def __str__(self) -> str:
        return format_spec(self)


def validate_spec(spec: DistributionSpec) -> ValidationResult:
    """Check the family's parameter constraints without raising."""
    errors: list[ValidationError] = []

    if not isinstance(spec.family, Family):
        errors.append(ValidationError("family", "Unknown family", spec.family))
        return ValidationResult(is_valid=False, errors=errors)

    if spec.family is Family.GAMMA:
        check_positive(errors, "alpha", spec.alpha)
        check_positive(errors, "rate", spec.rate)
    elif spec.family is Family.POISSON:
        check_positive(errors, "lambda", spec.rate)
    else:
        check_open_unit(errors, "p", spec.p)

    return ValidationResult(is_valid=len(errors) == 0, errors=errors)


# =============================================================================
# Text form
# =============================================================================

_SPEC_PATTERN = re.compile(r"^\s*(?P<family>[a-z]+)\s*:\s*(?P<params>.*?)\s*$", re.IGNORECASE)

_PARAM_NAMES = {
    Family.GAMMA: ({"alpha"}, {"rate"}),
    Family.POISSON: ({"lambda"}, set()),
    Family.GEOMETRIC: ({"p"}, set()),
}


def format_spec(spec: DistributionSpec) -> str:
    """Render `gamma:alpha=A,rate=L`, `poisson:lambda=L` or `geometric:p=P`."""
    params = ",".join(f"{name}={value!r}" for name, value in spec.params.items())
    return f"{spec.family.value}:{params}"


def parse_spec(text: str) -> DistributionSpec:
    """
    Parse the text form written by format_spec.

    Gamma rate defaults to 1 when omitted.

    Raises:
        ValidationError: with field "spec" for malformed text, or the
            parameter's name for out-of-range values
    """
    match = _SPEC_PATTERN.match(text or "")
    if not match:
        raise ValidationError("spec", "Expected FAMILY:NAME=VALUE[,NAME=VALUE]", text)

    try:
        family = Family(match.group("family").lower())
    except ValueError:
        raise ValidationError("spec", "Unknown family", match.group("family"))

    values: dict[str, float] = {}
    for part in filter(None, (piece.strip() for piece in match.group("params").split(","))):
        name, sep, raw = part.partition("=")
        name = name.strip().lower()
        if not sep:
            raise ValidationError("spec", "Parameter must be NAME=VALUE", part)
        if name in values:
            raise ValidationError("spec", "Parameter given twice", name)
        try:
            values[name] = float(raw)
        except ValueError:
            raise ValidationError("spec", f"Parameter {name} is not a number", raw.strip())

    required, optional = _PARAM_NAMES[family]
    missing = required - values.keys()
    unknown = values.keys() - required - optional
    if missing:
        raise ValidationError("spec", f"Missing parameter(s): {', '.join(sorted(missing))}", text)
    if unknown:
        raise ValidationError("spec", f"Unknown parameter(s): {', '.join(sorted(unknown))}", text)

    if family is Family.GAMMA:
        return DistributionSpec.gamma(values["alpha"], values.get("rate", 1.0))
    if family is Family.POISSON:
        return DistributionSpec.poisson(values["lambda"])
    return DistributionSpec.geometric(values["p"])


# =============================================================================
# Moments, CDF, density, Laplace transform
# =============================================================================

def mean(spec: DistributionSpec) -> float:
    """Population mean μ."""
    if spec.family is Family.GAMMA:
        return spec.alpha / spec.rate
    if spec.family is Family.POISSON:
        return spec.rate
    return (1.0 - spec.p) / spec.p


def variance(spec: DistributionSpec) -> float:
    """Population variance."""
    if spec.family is Family.GAMMA:
        return spec.alpha / spec.rate**2
    if spec.family is Family.POISSON:
        return spec.rate
    return (1.0 - spec.p) / spec.p**2


def _scalar_or_array(value: np.ndarray) -> Any:
    return float(value) if np.ndim(value) == 0 else value


def cdf(spec: DistributionSpec, t: ArrayLike) -> Any:
    """
    F(t) = P(X ≤ t).

    Discrete families are right-continuous steps evaluated at ⌊t⌋.
    Returns 0 for t < 0.
    """
    t = np.asarray(t, dtype=float)
    inside = t >= 0
    safe = np.where(inside, t, 0.0)

    if spec.family is Family.GAMMA:
        values = specnum.reg_gamma_lower(spec.alpha, spec.rate * safe)
    elif spec.family is Family.POISSON:
        values = specnum.reg_gamma_upper(np.floor(safe) + 1.0, spec.rate)
    else:
        values = -np.expm1((np.floor(safe) + 1.0) * math.log1p(-spec.p))

    return _scalar_or_array(np.where(inside, values, 0.0))


def density(spec: DistributionSpec, t: ArrayLike) -> Any:
    """Gamma pdf, or the pmf for discrete families (0 off the integers)."""
    t = np.asarray(t, dtype=float)
    if spec.family is Family.GAMMA:
        values = stats.gamma.pdf(t, spec.alpha, scale=1.0 / spec.rate)
    else:
        on_support = (t >= 0) & (t == np.floor(t))
        k = np.where(on_support, t, 0.0)
        if spec.family is Family.POISSON:
            values = stats.poisson.pmf(k, spec.rate)
        else:
            # scipy's geom starts at 1
            values = stats.geom.pmf(k + 1.0, spec.p)
        values = np.where(on_support, values, 0.0)
    return _scalar_or_array(values)


def laplace_transform(spec: DistributionSpec, x: ArrayLike) -> Any:
    """L_X(x) = E[exp(-xX)] for x ≥ 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise specnum.DomainError("laplace_transform", "x must be finite and non-negative", x)

    if spec.family is Family.GAMMA:
        values = np.exp(-spec.alpha * np.log1p(x / spec.rate))
    elif spec.family is Family.POISSON:
        values = np.exp(spec.rate * np.expm1(-x))
    else:
        values = spec.p / (1.0 - (1.0 - spec.p) * np.exp(-x))
    return _scalar_or_array(values)


def tilt(spec: DistributionSpec, x: float) -> DistributionSpec:
    """
    Exponentially tilted law with density ∝ exp(-x t) f(t).

    Each family is closed under tilting: Gamma(α, λ+x), Poisson(λe^{-x}),
    Geometric(1-(1-p)e^{-x}).
    """
    if not math.isfinite(x) or x < 0:
        raise specnum.DomainError("tilt", "x must be finite and non-negative", x)
    if spec.family is Family.GAMMA:
        return DistributionSpec.gamma(spec.alpha, spec.rate + x)
    if spec.family is Family.POISSON:
        return DistributionSpec.poisson(spec.rate * math.exp(-x))
    return DistributionSpec.geometric(-math.expm1(-x) + spec.p * math.exp(-x))


# =============================================================================
# Sampling
# =============================================================================

SEED_LIMIT = 2**64


@dataclass(frozen=True)
class Seed:
    """A 64-bit master seed. Streams are addressed by tuples of counts."""

    value: int

    def __post_init__(self) -> None:
        errors: list[ValidationError] = []
        check_count(errors, "seed", self.value, 0)
        if errors:
            raise errors[0]
        if int(self.value) >= SEED_LIMIT:
            raise ValidationError("seed", "Must fit in 64 bits", self.value)

    def generator(self, *stream: int) -> np.random.Generator:
        """Independent PCG64 generator for the given stream address."""
        sequence = np.random.SeedSequence(int(self.value), spawn_key=tuple(int(s) for s in stream))
        return np.random.Generator(np.random.PCG64(sequence))


def _draw(spec: DistributionSpec, rng: np.random.Generator, size: Any) -> np.ndarray:
    if spec.family is Family.GAMMA:
        return rng.standard_gamma(spec.alpha, size=size) / spec.rate
    if spec.family is Family.POISSON:
        return rng.poisson(spec.rate, size=size).astype(float)
    # numpy counts trials up to and including the first success
    return (rng.geometric(spec.p, size=size) - 1).astype(float)


def sample(spec: DistributionSpec, n: int, seed: Seed, stream: Any = 0) -> np.ndarray:
    """
    Draw n values from spec, deterministic in (seed, stream).

    stream may be an int or a tuple of ints (e.g. (cell, replication)).
    Discrete families return integer-valued floats.
    """
    errors: list[ValidationError] = []
    check_count(errors, "n", n, 1)
    if errors:
        raise errors[0]
    address = stream if isinstance(stream, tuple) else (stream,)
    return _draw(spec, seed.generator(*address), int(n))


def sample_matrix(spec: DistributionSpec, n: int, reps: int, seed: Seed, stream: Any = 0) -> np.ndarray:
    """reps × n draws from a single (seed, stream) generator."""
    errors: list[ValidationError] = []
    check_count(errors, "n", n, 1)
    check_count(errors, "reps", reps, 1)
    if errors:
        raise errors[0]
    address = stream if isinstance(stream, tuple) else (stream,)
    return _draw(spec, seed.generator(*address), (int(reps), int(n)))
