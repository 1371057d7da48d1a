"""
Input validation rules for populations, samples and run settings.

Provides field-level checks so that invalid parameters are rejected
before any quadrature, series or simulation work starts.
"""

import math
from dataclasses import dataclass, field
from typing import Any


class ValidationError(ValueError):
    """Raised when validation fails."""

    def __init__(self, field: str, message: str, value: Any = None):
        self.field = field
        self.message = message
        self.value = value
        super().__init__(f"{field}: {message}")

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "type": type(self).__name__,
            "field": self.field,
            "message": self.message,
            "value": _jsonable(self.value),
        }


@dataclass
class ValidationResult:
    """Result of validation operation."""

    is_valid: bool
    errors: list[ValidationError] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.is_valid

    def raise_first(self) -> None:
        """Raise the first collected error, if any."""
        if self.errors:
            raise self.errors[0]


def _jsonable(value: Any) -> Any:
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    return str(value)


def is_finite_number(value: Any) -> bool:
    """True for real, finite numbers (bools excluded)."""
    if isinstance(value, bool):
        return False
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def check_positive(errors: list[ValidationError], name: str, value: Any) -> None:
    """Append an error unless value is a finite number > 0."""
    if not is_finite_number(value):
        errors.append(ValidationError(name, "Must be a finite number", value))
    elif float(value) <= 0:
        errors.append(ValidationError(name, "Must be positive", value))


def check_open_unit(errors: list[ValidationError], name: str, value: Any) -> None:
    """Append an error unless 0 < value < 1."""
    if not is_finite_number(value):
        errors.append(ValidationError(name, "Must be a finite number", value))
    elif not 0.0 < float(value) < 1.0:
        errors.append(ValidationError(name, "Must lie strictly between 0 and 1", value))


def check_count(errors: list[ValidationError], name: str, value: Any, minimum: int) -> None:
    """Append an error unless value is an integer >= minimum."""
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            as_int = int(value)
        except (TypeError, ValueError):
            errors.append(ValidationError(name, "Must be an integer", value))
            return
        if as_int != value:
            errors.append(ValidationError(name, "Must be an integer", value))
            return
        value = as_int

    if value < minimum:
        errors.append(ValidationError(name, f"Must be at least {minimum}", value))


def require_count(name: str, value: Any, minimum: int) -> int:
    """Return value as int or raise ValidationError."""
    errors: list[ValidationError] = []
    check_count(errors, name, value, minimum)
    if errors:
        raise errors[0]
    return int(value)


def require_positive(name: str, value: Any) -> float:
    """Return value as float or raise ValidationError."""
    errors: list[ValidationError] = []
    check_positive(errors, name, value)
    if errors:
        raise errors[0]
    return float(value)


def require_open_unit(name: str, value: Any) -> float:
    """Return value as float in (0, 1) or raise ValidationError."""
    errors: list[ValidationError] = []
    check_open_unit(errors, name, value)
    if errors:
        raise errors[0]
    return float(value)
