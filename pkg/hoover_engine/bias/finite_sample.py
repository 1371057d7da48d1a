"""
Exact finite-sample expectation and bias of the Hoover estimator.

Each family reduces E[Ĥ] to a one-dimensional integral:

- Gamma(α, λ), independent of λ:
    E[Ĥ] = 1 - 1/n - (1/(nα)) ∫₀^∞ Q(α, w/(n-1)) Q((n-1)α, w) dw
  where the integral equals E[min{(n-1)U, V}] for independent
  U ~ Gamma(α, 1), V ~ Gamma((n-1)α, 1).
- Poisson(λ):
    E[Ĥ] = ∫₀^λ e^{-n(λ-w)} [(n-1) - S(w)/w] dw,
    S(w) = Σ_k P(⌊k/(n-1)⌋+1, w) P(k+1, (n-1)w)
- Geometric(p):
    E[Ĥ] = (1-1/n)(1-pⁿ) - ∫₀^{1-p} (p/(1-w))ⁿ T(w) dw,
    T(w) = Σ_k w^{⌊k/(n-1)⌋} I_w(k+1, n-1)

P/Q are the regularized lower/upper incomplete gamma functions and I_w
the regularized incomplete beta function.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np

from ..core import specnum
from ..core.distributions import DistributionSpec, Family, Seed, sample_matrix
from ..core.estimators import gini_hat_rows, hoover_hat_rows
from ..core.hoover import hoover_closed
from ..core.specnum import NonConvergenceError, QuadratureConfig, SeriesConfig
from ..core.validation import require_count, require_open_unit, require_positive
from .models import BiasReport, ExpectationResult, MonteCarloEstimate

logger = logging.getLogger(__name__)

# exp(-40) weight is below every tolerance in use
EXP_WINDOW = 40.0
# below this w the Poisson bracket/w is replaced by its limit n - 1
POISSON_W_GUARD = 1e-300
GEOMETRIC_POWER_FLOOR = 1e-16
# T(w) switches from the series to the closed form at this w
GEOMETRIC_CLOSED_FORM_W = 0.9
RANGE_SLACK = 1e-12
ORACLE_BLOCK = 1 << 16
SAMPLE_BLOCK_VALUES = 1 << 20


# =============================================================================
# Bounds
# =============================================================================

def upper_bound_expectation(spec: DistributionSpec, n: int) -> float:
    """The family's analytic ceiling on E[Ĥ]."""
    n = require_count("n", n, 2)
    head = 1.0 - 1.0 / n
    if spec.family is Family.GAMMA:
        return head
    if spec.family is Family.POISSON:
        return head * -math.expm1(-n * spec.rate)
    return head * -math.expm1(n * math.log(spec.p))


def _within_bounds(value: float, err_est: float, upper: float, diag: dict) -> float:
    """Clip rounding-level excursions outside [0, upper]; anything larger is an error."""
    slack = max(err_est, RANGE_SLACK)
    if value < 0.0:
        if value < -slack:
            raise NonConvergenceError("expectation fell below 0", value, err_est, diag)
        return 0.0
    if value > upper:
        if value > upper + slack:
            raise NonConvergenceError("expectation exceeded its analytic ceiling", value, err_est, diag)
        return upper
    return value


# =============================================================================
# Gamma
# =============================================================================

def _gamma_tail_bound(alpha: float, m: int):
    beta = m * alpha

    def tail(cutoff: float) -> float:
        # ∫_W^∞ Q(β, w) dw = β Q(β+1, W) - W Q(β, W); same idea for the α factor
        via_sum = beta * specnum.reg_gamma_upper(beta + 1.0, cutoff) - cutoff * specnum.reg_gamma_upper(beta, cutoff)
        scaled = cutoff / m
        via_single = m * (
            alpha * specnum.reg_gamma_upper(alpha + 1.0, scaled) - scaled * specnum.reg_gamma_upper(alpha, scaled)
        )
        return max(0.0, min(via_sum, via_single))

    return tail


def min_integral_gamma(alpha: float, n: int, cfg: QuadratureConfig = QuadratureConfig()) -> specnum.QuadratureResult:
    """∫₀^∞ Q(α, w/(n-1)) Q((n-1)α, w) dw, which equals E[min{(n-1)U, V}]."""
    alpha = require_positive("alpha", alpha)
    n = require_count("n", n, 2)
    m = n - 1
    beta = m * alpha

    def integrand(w: float) -> float:
        return specnum.reg_gamma_upper(alpha, w / m) * specnum.reg_gamma_upper(beta, w)

    return specnum.integrate_semi_infinite(integrand, _gamma_tail_bound(alpha, m), cfg)


def expected_hoover_gamma(alpha: float, n: int, cfg: QuadratureConfig = QuadratureConfig()) -> ExpectationResult:
    """E[Ĥ] under Gamma(α, ·). No rate is accepted: the expectation does not depend on it."""
    alpha = require_positive("alpha", alpha)
    n = require_count("n", n, 2)

    integral = min_integral_gamma(alpha, n, cfg)
    value = 1.0 - 1.0 / n - integral.value / (n * alpha)
    err_est = integral.err_est / (n * alpha)
    diag = {
        "path": "gamma_min_integral",
        "integral": integral.value,
        "cutoff": integral.cutoff,
        "evaluations": integral.evaluations,
    }
    logger.debug("gamma alpha=%g n=%d: integral %.12g cut at %g", alpha, n, integral.value, integral.cutoff)

    upper = 1.0 - 1.0 / n
    return ExpectationResult(_within_bounds(value, err_est, upper, diag), err_est, n, upper, diag)


# =============================================================================
# Poisson
# =============================================================================

def _poisson_inner_sum(w: float, n: int, scfg: SeriesConfig) -> specnum.SeriesSum:
    m = n - 1
    mw = m * w

    def term(ks: np.ndarray) -> np.ndarray:
        return specnum.reg_gamma_lower(ks // m + 1, w) * specnum.reg_gamma_lower(ks + 1, mw)

    min_terms = math.ceil(mw + 10.0 * math.sqrt(mw) + 20.0)
    return specnum.sum_series(term, scfg, min_terms=min_terms, vectorized=True)


def expected_hoover_poisson(
    lam: float,
    n: int,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> ExpectationResult:
    """
    E[Ĥ] under Poisson(λ).

    The integrand weight e^{-n(λ-w)} is negligible below λ - 40/n, so the
    range is cut there and the neglected piece added to err_est.
    """
    lam = require_positive("lambda", lam)
    n = require_count("n", n, 2)
    m = n - 1

    diag = {"path": "poisson_tilted_sum", "evaluations": 0, "max_terms_used": 0}
    worst_tail = [0.0]

    def integrand(w: float) -> float:
        weight = math.exp(-n * (lam - w))
        if w < POISSON_W_GUARD:
            return weight * m
        inner = _poisson_inner_sum(w, n, scfg)
        diag["evaluations"] += 1
        diag["max_terms_used"] = max(diag["max_terms_used"], inner.terms_used)
        worst_tail[0] = max(worst_tail[0], inner.tail_estimate / w)
        return weight * (m - inner.value / w)

    lo = max(0.0, lam - EXP_WINDOW / n)
    result = specnum.integrate_finite(integrand, lo, lam, qcfg)
    # the bracket/w never exceeds n - 1
    dropped = (m / n) * math.exp(-n * (lam - lo)) if lo > 0.0 else 0.0
    err_est = result.err_est + worst_tail[0] / n + dropped
    diag["window_start"] = lo
    logger.debug("poisson lambda=%g n=%d: %d inner sums, longest %d terms", lam, n, diag["evaluations"], diag["max_terms_used"])

    upper = (1.0 - 1.0 / n) * -math.expm1(-n * lam)
    return ExpectationResult(_within_bounds(result.value, err_est, upper, diag), err_est, n, upper, diag)


# =============================================================================
# Geometric
# =============================================================================

def _geometric_inner_series(w: float, n: int, scfg: SeriesConfig) -> specnum.SeriesSum:
    m = n - 1

    def term(ks: np.ndarray) -> np.ndarray:
        return np.power(w, ks // m) * specnum.reg_inc_beta(w, ks + 1, m)

    powers = math.ceil(math.log(GEOMETRIC_POWER_FLOOR) / math.log(w))
    min_terms = min(m * max(powers, 1), scfg.max_terms)
    return specnum.sum_series(term, scfg, min_terms=min_terms, vectorized=True)


def _geometric_inner_closed(w: float, n: int) -> float:
    """
    T(w) without truncation, for w close to 1.

    I_w(k+1, m) = P(V > k) for V ~ NegBin(m, w) counting successes before
    the m-th failure, so with V = qm + r

        T(w) = E[m (1 - w^q)/(1 - w) + r w^q].

    E[ζ^V; V ≡ r mod m] with ζ = w^{1/m} comes from the generating
    function ((1-w)/(1-wz))^m at z = ζ·(m-th roots of unity) through one FFT.
    Stable for w near 1, where the weights ζ^{-r} stay below 1/w.
    """
    m = n - 1
    r = np.arange(m)
    zeta = w ** (1.0 / m)
    denominator = 1.0 - w * zeta * np.exp(2j * np.pi * r / m)
    denominator[0] = -math.expm1((1.0 + 1.0 / m) * math.log(w))
    residues = np.fft.fft(((1.0 - w) / denominator) ** m).real / m
    weighted = residues * np.power(zeta, -r.astype(float))
    power_mean = float(np.sum(weighted))
    remainder_mean = float(np.dot(r, weighted))
    return m * (1.0 - power_mean) / (1.0 - w) + remainder_mean


def _geometric_inner_sum(w: float, n: int, scfg: SeriesConfig) -> specnum.SeriesSum:
    # the series needs O(1/(1-w)) terms near w = 1
    if w >= GEOMETRIC_CLOSED_FORM_W:
        return specnum.SeriesSum(_geometric_inner_closed(w, n), 0)
    return _geometric_inner_series(w, n, scfg)


def expected_hoover_geometric(
    p: float,
    n: int,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> ExpectationResult:
    """E[Ĥ] under Geometric(p) on {0, 1, ...}."""
    p = require_open_unit("p", p)
    n = require_count("n", n, 2)
    m = n - 1
    top = 1.0 - p

    diag = {"path": "geometric_tilted_sum", "evaluations": 0, "max_terms_used": 0}
    worst_tail = [0.0]

    def integrand(w: float) -> float:
        weight = math.exp(n * math.log(p / (1.0 - w)))
        inner = _geometric_inner_sum(w, n, scfg)
        diag["evaluations"] += 1
        diag["max_terms_used"] = max(diag["max_terms_used"], inner.terms_used)
        worst_tail[0] = max(worst_tail[0], inner.tail_estimate)
        return weight * inner.value

    # (p/(1-w))ⁿ falls below e^{-40} left of this point
    lo = max(0.0, top - p * math.expm1(EXP_WINDOW / n))
    result = specnum.integrate_finite(integrand, lo, top, qcfg)
    dropped = (m / n) * math.exp(n * math.log(p / (1.0 - lo))) if lo > 0.0 else 0.0
    err_est = result.err_est + worst_tail[0] * (top - lo) + dropped
    diag["window_start"] = lo
    logger.debug("geometric p=%g n=%d: %d inner sums, longest %d terms", p, n, diag["evaluations"], diag["max_terms_used"])

    upper = (1.0 - 1.0 / n) * -math.expm1(n * math.log(p))
    value = upper - result.value
    return ExpectationResult(_within_bounds(value, err_est, upper, diag), err_est, n, upper, diag)


# =============================================================================
# Dispatch and bias
# =============================================================================

def expected_hoover(
    spec: DistributionSpec,
    n: int,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> ExpectationResult:
    """E[Ĥ] for any supported family."""
    if spec.family is Family.GAMMA:
        return expected_hoover_gamma(spec.alpha, n, qcfg)
    if spec.family is Family.POISSON:
        return expected_hoover_poisson(spec.rate, n, qcfg, scfg)
    return expected_hoover_geometric(spec.p, n, qcfg, scfg)


def bias(
    spec: DistributionSpec,
    n: int,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> BiasReport:
    """
    Bias(Ĥ, H) = E[Ĥ] - H.

    Bounds: [-H, ceiling - H] with the family's ceiling on E[Ĥ].
    """
    n = require_count("n", n, 2)
    H = hoover_closed(spec).value
    expectation = expected_hoover(spec, n, qcfg, scfg)
    return BiasReport(
        spec=spec,
        n=n,
        H=H,
        expected_H_hat=expectation.value,
        bias=expectation.value - H,
        lower_bound=-H,
        upper_bound=expectation.upper_bound - H,
        err_est=expectation.err_est,
    )


def bias_curve(
    spec: DistributionSpec,
    ns: Iterable[int],
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> list[BiasReport]:
    """Bias for each sample size in ns, in the given order."""
    return [bias(spec, n, qcfg, scfg) for n in ns]


# =============================================================================
# Monte Carlo oracles
# =============================================================================

def _summarize(values: np.ndarray) -> MonteCarloEstimate:
    reps = int(values.size)
    se = float(np.std(values, ddof=1)) / math.sqrt(reps) if reps > 1 else math.inf
    return MonteCarloEstimate(float(np.mean(values)), se, reps)


def _blocks(reps: int, size: int) -> list[tuple[int, int]]:
    return [(index, min(size, reps - start)) for index, start in enumerate(range(0, reps, size))]


def _map_blocks(draw, blocks: list[tuple[int, int]], workers: int) -> list:
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda block: draw(*block), blocks))
    return [draw(*block) for block in blocks]


def min_tilted_oracle(alpha: float, n: int, reps: int, seed: Seed, workers: int = 1) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of E[min{(n-1)U, V}], U ~ Gamma(α, 1), V ~ Gamma((n-1)α, 1).

    Draws come in fixed-size blocks, each from its own stream, so the
    result does not depend on the worker count.
    """
    alpha = require_positive("alpha", alpha)
    n = require_count("n", n, 2)
    reps = require_count("reps", reps, 1)
    m = n - 1

    def draw(index: int, size: int) -> np.ndarray:
        rng = seed.generator(index)
        u = rng.standard_gamma(alpha, size=size)
        v = rng.standard_gamma(m * alpha, size=size)
        return np.minimum(m * u, v)

    values = np.concatenate(_map_blocks(draw, _blocks(reps, ORACLE_BLOCK), workers))
    return _summarize(values)


def simulate_hoover_mean(
    spec: DistributionSpec,
    n: int,
    reps: int,
    seed: Seed,
    workers: int = 1,
) -> tuple[MonteCarloEstimate, MonteCarloEstimate]:
    """
    Monte Carlo means of Ĥ and Ĝ over reps samples of size n.

    Ĝ uses the Ĥ convention (0) for samples summing to 0.
    """
    n = require_count("n", n, 2)
    reps = require_count("reps", reps, 1)
    rows = max(1, SAMPLE_BLOCK_VALUES // n)

    def draw(index: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        matrix = sample_matrix(spec, n, size, seed, stream=(index,))
        return hoover_hat_rows(matrix), gini_hat_rows(matrix)

    parts = _map_blocks(draw, _blocks(reps, rows), workers)
    hoover = np.concatenate([part[0] for part in parts])
    gini = np.concatenate([part[1] for part in parts])
    return _summarize(hoover), _summarize(gini)
