"""
Special-function kernel and numerical integration/summation utilities.

Everything downstream (population indices, finite-sample expectations,
maximum-likelihood fitting) evaluates its formulas through this module:
- log-gamma, digamma and trigamma
- regularized incomplete gamma P(a, x), Q(a, x) and beta I_x(a, b)
- adaptive quadrature on finite and semi-infinite ranges
- truncated summation of non-negative series

Special functions accept scalars or numpy arrays; scalar input gives a
Python float back. All functions are pure and thread-safe.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, special

from .validation import ValidationError, check_count, check_positive

logger = logging.getLogger(__name__)


# =============================================================================
# Errors
# =============================================================================

class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""

    def __init__(self, function: str, message: str, value: Any = None):
        self.function = function
        self.message = message
        self.value = value
        super().__init__(f"{function}: {message}")

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "type": type(self).__name__,
            "field": self.function,
            "message": self.message,
        }


class NonConvergenceError(ArithmeticError):
    """Raised when a quadrature, series or iteration fails to converge.

    Carries the best estimate reached so callers can report it.
    """

    def __init__(
        self,
        message: str,
        estimate: float = math.nan,
        err_est: float = math.inf,
        diagnostics: Optional[dict] = None,
    ):
        self.message = message
        self.estimate = estimate
        self.err_est = err_est
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} (estimate={estimate!r}, err_est={err_est!r})")

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "type": type(self).__name__,
            "field": None,
            "message": self.message,
            "estimate": self.estimate if math.isfinite(self.estimate) else None,
            "err_est": self.err_est if math.isfinite(self.err_est) else None,
            "diagnostics": self.diagnostics,
        }


# =============================================================================
# Configuration
# =============================================================================

REL_TOL_ENV = "INEQ_REL_TOL"
SERIES_TOL_ENV = "INEQ_SERIES_TOL"


def _env_float(environ: Mapping[str, str], name: str, default: float) -> float:
    raw = environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(name, "Environment override must be a number", raw)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for adaptive quadrature."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cut_tol: float = 1e-12  # bound on the neglected semi-infinite tail
    max_cutoff: float = 1e12  # give up searching for a tail cutoff beyond this

    def __post_init__(self) -> None:
        errors: list[ValidationError] = []
        check_positive(errors, "rel_tol", self.rel_tol)
        check_positive(errors, "abs_tol", self.abs_tol)
        check_count(errors, "max_subdivisions", self.max_subdivisions, 1)
        check_positive(errors, "tail_cut_tol", self.tail_cut_tol)
        check_positive(errors, "max_cutoff", self.max_cutoff)
        if errors:
            raise errors[0]

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "QuadratureConfig":
        """Defaults with INEQ_REL_TOL applied."""
        environ = os.environ if environ is None else environ
        values = {"rel_tol": _env_float(environ, REL_TOL_ENV, cls.rel_tol)}
        values.update(overrides)
        return cls(**values)

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_subdivisions": self.max_subdivisions,
            "tail_cut_tol": self.tail_cut_tol,
        }


@dataclass(frozen=True)
class SeriesConfig:
    """Stopping rule for truncated non-negative series."""

    term_rel_tol: float = 1e-14
    max_terms: int = 1_000_000
    abs_floor: float = 1e-300  # terms this small count as zero when the sum is zero

    def __post_init__(self) -> None:
        errors: list[ValidationError] = []
        check_positive(errors, "term_rel_tol", self.term_rel_tol)
        check_count(errors, "max_terms", self.max_terms, 1)
        check_positive(errors, "abs_floor", self.abs_floor)
        if errors:
            raise errors[0]

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "SeriesConfig":
        """Defaults with INEQ_SERIES_TOL applied."""
        environ = os.environ if environ is None else environ
        values = {"term_rel_tol": _env_float(environ, SERIES_TOL_ENV, cls.term_rel_tol)}
        values.update(overrides)
        return cls(**values)

    def to_dict(self) -> dict:
        """Convert to dictionary representation."""
        return {"term_rel_tol": self.term_rel_tol, "max_terms": self.max_terms}


# =============================================================================
# Special functions
# =============================================================================

def _scalar_or_array(value: np.ndarray) -> Any:
    if np.ndim(value) == 0:
        return float(value)
    return value


def _require(function: str, ok: Any, message: str, value: Any) -> None:
    if not np.all(ok):
        raise DomainError(function, message, value)


def log_gamma(x: ArrayLike) -> Any:
    """ln Γ(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    _require("log_gamma", np.isfinite(x) & (x > 0), "argument must be finite and positive", x)
    return _scalar_or_array(special.gammaln(x))


def digamma(x: ArrayLike) -> Any:
    """ψ(x) = d/dx ln Γ(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    _require("digamma", np.isfinite(x) & (x > 0), "argument must be finite and positive", x)
    return _scalar_or_array(special.digamma(x))


def trigamma(x: ArrayLike) -> Any:
    """ψ'(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    _require("trigamma", np.isfinite(x) & (x > 0), "argument must be finite and positive", x)
    return _scalar_or_array(special.polygamma(1, x))


def _check_gamma_args(function: str, a: np.ndarray, x: np.ndarray) -> None:
    _require(function, np.isfinite(a) & (a > 0), "shape a must be finite and positive", a)
    _require(function, ~np.isnan(x) & (x >= 0), "argument x must be non-negative", x)


def reg_gamma_lower(a: ArrayLike, x: ArrayLike) -> Any:
    """Regularized lower incomplete gamma P(a, x) = γ(a, x)/Γ(a)."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_gamma_args("reg_gamma_lower", a, x)
    return _scalar_or_array(special.gammainc(a, x))


def reg_gamma_upper(a: ArrayLike, x: ArrayLike) -> Any:
    """Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a)."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_gamma_args("reg_gamma_upper", a, x)
    return _scalar_or_array(special.gammaincc(a, x))


def reg_inc_beta(x: ArrayLike, a: ArrayLike, b: ArrayLike) -> Any:
    """Regularized incomplete beta I_x(a, b)."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _require("reg_inc_beta", (x >= 0) & (x <= 1), "x must lie in [0, 1]", x)
    _require("reg_inc_beta", np.isfinite(a) & (a > 0), "a must be finite and positive", a)
    _require("reg_inc_beta", np.isfinite(b) & (b > 0), "b must be finite and positive", b)
    return _scalar_or_array(special.betainc(a, b, x))


# =============================================================================
# Quadrature
# =============================================================================

class QuadratureResult(NamedTuple):
    """Integral estimate with its error bound."""

    value: float
    err_est: float
    evaluations: int = 0
    cutoff: Optional[float] = None  # upper limit used for semi-infinite ranges


def integrate_finite(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> QuadratureResult:
    """
    Adaptive Gauss-Kronrod quadrature of f over [lo, hi].

    Integrable endpoint singularities are allowed; f is never evaluated
    exactly at the endpoints.

    Raises:
        DomainError: if lo >= hi or either limit is not finite
        NonConvergenceError: if the subdivision limit is reached
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise DomainError("integrate_finite", "requires finite lo < hi", (lo, hi))

    result = integrate.quad(
        f,
        lo,
        hi,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    value, err_est, info = result[0], result[1], result[2]
    evaluations = int(info.get("neval", 0))

    # a fourth element is QUADPACK's explanation of a non-zero exit code
    if len(result) > 3:
        raise NonConvergenceError(
            f"quadrature on [{lo}, {hi}] did not converge: {result[3]}",
            estimate=float(value),
            err_est=float(err_est),
            diagnostics={"evaluations": evaluations, "subintervals": int(info.get("last", 0))},
        )

    return QuadratureResult(float(value), float(err_est), evaluations)


def integrate_semi_infinite(
    f: Callable[[float], float],
    tail_bound: Callable[[float], float],
    cfg: QuadratureConfig = QuadratureConfig(),
) -> QuadratureResult:
    """
    Integrate f over [0, ∞) by cutting the range at a finite W.

    tail_bound(W) must bound ∫_W^∞ |f(x)| dx and decrease to 0. The cutoff
    is the first W = 2^j (j ≥ 0) with tail_bound(W) ≤ cfg.tail_cut_tol;
    the returned err_est includes tail_bound(W).
    """
    cutoff = 1.0
    tail = float(tail_bound(cutoff))
    while not tail <= cfg.tail_cut_tol:
        cutoff *= 2.0
        if cutoff > cfg.max_cutoff:
            raise NonConvergenceError(
                "no tail cutoff found below the configured cap",
                err_est=tail,
                diagnostics={"cutoff": cutoff / 2.0, "max_cutoff": cfg.max_cutoff},
            )
        tail = float(tail_bound(cutoff))

    logger.debug("semi-infinite integral cut at W=%g (tail bound %.3g)", cutoff, tail)
    head = integrate_finite(f, 0.0, cutoff, cfg)
    return QuadratureResult(head.value, head.err_est + max(tail, 0.0), head.evaluations, cutoff)


# =============================================================================
# Series
# =============================================================================

class SeriesSum(NamedTuple):
    """Truncated series value."""

    value: float
    terms_used: int
    tail_estimate: float = 0.0  # geometric-ratio estimate of the omitted tail


def _tail_estimate(previous: float, last: float, value: float, cfg: SeriesConfig) -> float:
    if last <= 0.0:
        return 0.0
    if previous > 0.0 and last < previous:
        ratio = last / previous
        return last / (1.0 - ratio)
    return cfg.term_rel_tol * abs(value)


def _converged(window_max: float, partial: float, count: int, min_terms: int, cfg: SeriesConfig) -> bool:
    if count < max(3, min_terms):
        return False
    if partial == 0.0:
        return window_max <= cfg.abs_floor
    return window_max <= cfg.term_rel_tol * partial


def sum_series(
    term: Callable[[Any], Any],
    cfg: SeriesConfig = SeriesConfig(),
    *,
    start: int = 0,
    min_terms: int = 0,
    vectorized: bool = False,
) -> SeriesSum:
    """
    Sum non-negative terms term(start), term(start+1), ... until the
    largest of the last three terms is ≤ cfg.term_rel_tol × partial sum.

    With vectorized=True, term receives an integer numpy array of indices
    and must return an array of the same length; the stopping rule is the
    same, applied position by position.

    Raises:
        NonConvergenceError: if cfg.max_terms terms do not meet the rule
    """
    if vectorized:
        return _sum_series_blocks(term, cfg, start, min_terms)

    partial = 0.0
    window = [0.0, 0.0, 0.0]
    for count in range(1, cfg.max_terms + 1):
        value = float(term(start + count - 1))
        if not math.isfinite(value):
            raise DomainError("sum_series", "series term is not finite", start + count - 1)
        partial += value
        window = [window[1], window[2], value]
        if _converged(max(window), partial, count, min_terms, cfg):
            return SeriesSum(partial, count, _tail_estimate(window[1], window[2], partial, cfg))

    raise NonConvergenceError(
        "series did not meet the truncation rule",
        estimate=partial,
        diagnostics={"terms_used": cfg.max_terms},
    )


def _sum_series_blocks(
    term: Callable[[np.ndarray], np.ndarray],
    cfg: SeriesConfig,
    start: int,
    min_terms: int,
) -> SeriesSum:
    total = 0.0
    used = 0
    size = max(64, min_terms)
    previous = np.zeros(2)

    while used < cfg.max_terms:
        stop = min(used + size, cfg.max_terms)
        ks = np.arange(start + used, start + stop)
        values = np.asarray(term(ks), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError("sum_series", "series term is not finite", int(ks[~np.isfinite(values)][0]))

        partial = total + np.cumsum(values)
        window = np.concatenate([previous, values])
        window_max = np.maximum(np.maximum(window[2:], window[1:-1]), window[:-2])
        counts = np.arange(used + 1, stop + 1)

        ready = counts >= max(3, min_terms)
        small = np.where(
            partial == 0.0,
            window_max <= cfg.abs_floor,
            window_max <= cfg.term_rel_tol * partial,
        )
        hits = np.flatnonzero(ready & small)
        if hits.size:
            j = int(hits[0])
            value = float(partial[j])
            tail = _tail_estimate(float(window[j + 1]), float(window[j + 2]), value, cfg)
            return SeriesSum(value, int(counts[j]), tail)

        total = float(partial[-1])
        previous = window[-2:]
        used = stop
        size *= 2

    raise NonConvergenceError(
        "series did not meet the truncation rule",
        estimate=total,
        diagnostics={"terms_used": used},
    )
