"""
Monte Carlo study of the raw and bias-corrected Hoover estimators.

Each cell (population, n) draws R samples. Replication r of cell c uses
the random stream (c, r), so results are identical whatever the worker
count or execution order. Work is split into contiguous chunks and
reduced in replication order.

The correction needs Bias_n at every fitted parameter. By default a
cubic interpolant of E[Ĥ] over the range of fitted parameters stands in
for the exact evaluation; exact H is added back per replication since H
itself has kinks for the discrete families.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from ..bias.finite_sample import bias, expected_hoover
from ..bias.fitting import FittingError, fit_ml
from ..core.distributions import DistributionSpec, Family, Seed, sample
from ..core.estimators import Sample, hoover_hat
from ..core.hoover import hoover_closed
from ..core.specnum import DomainError, NonConvergenceError, QuadratureConfig, SeriesConfig
from ..core.validation import require_count
from .models import SimulationCell, SimulationConfig

logger = logging.getLogger(__name__)

INTERPOLANT_KNOTS = 200
INTERPOLANT_MAX_KNOTS = 3200
INTERPOLANT_TOL = 1e-6
RANGE_PADDING = 0.05
CHUNKS_PER_WORKER = 4

_REPLICATION_ERRORS = (FittingError, DomainError, NonConvergenceError)


class CellFailedError(RuntimeError):
    """Every replication of a cell failed."""

    def __init__(self, spec: DistributionSpec, n: int, reason: str):
        self.spec = spec
        self.n = n
        self.reason = reason
        super().__init__(f"{spec} n={n}: all replications failed ({reason})")


# =============================================================================
# Worker tasks (module level so they pickle)
# =============================================================================

def _replicate_chunk(
    spec: DistributionSpec,
    n: int,
    seed: Seed,
    cell_index: int,
    start: int,
    stop: int,
    fit: bool,
) -> list[tuple[float, Optional[float], Optional[str]]]:
    """(Ĥ_r, fitted parameter or None, failure reason or None) for r in [start, stop)."""
    results = []
    for r in range(start, stop):
        s = Sample(sample(spec, n, seed, stream=(cell_index, r)))
        raw = hoover_hat(s)
        if not fit:
            results.append((raw, None, None))
            continue
        try:
            results.append((raw, fit_ml(s, spec.family).spec.parameter, None))
        except _REPLICATION_ERRORS as exc:
            results.append((raw, None, type(exc).__name__))
    return results


def _exact_bias_chunk(
    spec: DistributionSpec,
    n: int,
    params: Sequence[float],
    qcfg: QuadratureConfig,
    scfg: SeriesConfig,
) -> list[float]:
    """Exact bias at each parameter; NaN where the evaluation fails."""
    values = []
    for value in params:
        try:
            values.append(bias(spec.with_parameter(value), n, qcfg, scfg).bias)
        except _REPLICATION_ERRORS as exc:
            logger.warning("exact bias failed at %s=%r: %s", spec.family.value, value, exc)
            values.append(math.nan)
    return values


def _expectation_chunk(
    spec: DistributionSpec,
    n: int,
    params: Sequence[float],
    qcfg: QuadratureConfig,
    scfg: SeriesConfig,
) -> list[float]:
    return [expected_hoover(spec.with_parameter(value), n, qcfg, scfg).value for value in params]


def _chunks(count: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, min(count, workers * CHUNKS_PER_WORKER))
    size = math.ceil(count / pieces)
    return [(start, min(start + size, count)) for start in range(0, count, size)]


def _run_chunked(task: Callable, count: int, workers: int, make_args: Callable[[int, int], tuple]) -> list:
    """Run task over contiguous chunks of range(count), concatenating results in order."""
    chunks = _chunks(count, workers)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(task, *make_args(start, stop)) for start, stop in chunks]
            parts = [future.result() for future in futures]
    else:
        parts = [task(*make_args(start, stop)) for start, stop in chunks]
    return [item for part in parts for item in part]


# =============================================================================
# Interpolated bias
# =============================================================================

def _parameter_range(family: Family, lo: float, hi: float) -> tuple[float, float]:
    if family is Family.GEOMETRIC:
        width = max(hi - lo, RANGE_PADDING * lo)
        return max(lo - RANGE_PADDING * width, 0.5 * lo), min(hi + RANGE_PADDING * width, 0.5 * (1.0 + hi))
    return lo / (1.0 + RANGE_PADDING), hi * (1.0 + RANGE_PADDING)


def _knot_axis(family: Family, lo: float, hi: float, count: int) -> np.ndarray:
    if family is Family.GEOMETRIC:
        return np.linspace(lo, hi, count)
    return np.geomspace(lo, hi, count)


def _midpoints(family: Family, knots: np.ndarray) -> np.ndarray:
    if family is Family.GEOMETRIC:
        return 0.5 * (knots[1:] + knots[:-1])
    return np.sqrt(knots[1:] * knots[:-1])


@dataclass
class BiasInterpolant:
    """
    Bias_n(θ) ≈ spline(E[Ĥ])(θ) - H(θ) for one family and n.

    Parameters outside [knots[0], knots[-1]] use the exact evaluation.
    """

    spec: DistributionSpec  # family template; its parameter is replaced per call
    n: int
    knots: np.ndarray
    values: np.ndarray
    max_error: float
    qcfg: QuadratureConfig = QuadratureConfig()
    scfg: SeriesConfig = SeriesConfig()

    def __post_init__(self) -> None:
        self._spline = CubicSpline(self.knots, self.values)

    @property
    def lo(self) -> float:
        return float(self.knots[0])

    @property
    def hi(self) -> float:
        return float(self.knots[-1])

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        state.pop("_spline", None)
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._spline = CubicSpline(self.knots, self.values)

    def expectation(self, parameter: float) -> float:
        if not self.lo <= parameter <= self.hi:
            return expected_hoover(self.spec.with_parameter(parameter), self.n, self.qcfg, self.scfg).value
        return float(self._spline(parameter))

    def __call__(self, spec: DistributionSpec, n: int) -> float:
        if n != self.n or spec.family is not self.spec.family:
            return bias(spec, n, self.qcfg, self.scfg).bias
        return self.expectation(spec.parameter) - hoover_closed(spec).value


def bias_interpolant(
    spec: DistributionSpec,
    n: int,
    lo: float,
    hi: float,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
    *,
    knots: int = INTERPOLANT_KNOTS,
    max_knots: int = INTERPOLANT_MAX_KNOTS,
    tol: float = INTERPOLANT_TOL,
    workers: int = 1,
) -> BiasInterpolant:
    """
    Cubic interpolant of Bias_n over the parameter range [lo, hi] (padded).

    Knots are log-spaced for α and λ, linear for p. Exact values at the
    midpoints between knots are compared with the spline; while the worst
    gap is ≥ tol, the midpoints become knots and the check repeats.
    """
    n = require_count("n", n, 2)
    lo, hi = _parameter_range(spec.family, float(lo), float(hi))
    axis = _knot_axis(spec.family, lo, hi, knots)

    def evaluate(points: np.ndarray) -> np.ndarray:
        values = _run_chunked(
            _expectation_chunk,
            len(points),
            workers,
            lambda start, stop: (spec, n, points[start:stop].tolist(), qcfg, scfg),
        )
        return np.asarray(values, dtype=float)

    values = evaluate(axis)
    while True:
        spline = CubicSpline(axis, values)
        middle = _midpoints(spec.family, axis)
        exact = evaluate(middle)
        error = float(np.max(np.abs(spline(middle) - exact)))
        logger.debug("bias interpolant %s n=%d: %d knots, midpoint error %.3g", spec.family.value, n, axis.size, error)

        merged_axis = np.empty(axis.size + middle.size)
        merged_axis[0::2] = axis
        merged_axis[1::2] = middle
        merged_values = np.empty_like(merged_axis)
        merged_values[0::2] = values
        merged_values[1::2] = exact
        axis, values = merged_axis, merged_values

        if error < tol:
            break
        if axis.size > max_knots:
            logger.warning(
                "bias interpolant for %s n=%d stopped at %d knots with error %.3g",
                spec.family.value,
                n,
                axis.size,
                error,
            )
            break

    return BiasInterpolant(spec, n, axis, values, error, qcfg, scfg)


# =============================================================================
# Cells and grids
# =============================================================================

def _metrics(estimates: np.ndarray, H: float) -> tuple[float, float, float]:
    """(relbias, rmse, se of relbias)."""
    relative = (estimates - H) / H
    relbias = float(np.mean(relative))
    rmse = float(np.sqrt(np.mean((estimates - H) ** 2)))
    se = float(np.std(relative, ddof=1)) / math.sqrt(estimates.size) if estimates.size > 1 else math.nan
    return relbias, rmse, se


def run_cell(
    spec: DistributionSpec,
    n: int,
    R: int,
    seed: Seed,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
    *,
    apply_correction: bool = True,
    exact_bias: bool = False,
    workers: int = 1,
    cell_index: int = 0,
    compute_expectation: bool = False,
) -> SimulationCell:
    """
    Simulate one cell: R samples of size n, Ĥ and (optionally) Ĥᶜ per sample.

    Ĥ is defined for every sample, so the raw metrics cover all R
    replications; the corrected ones cover those whose fit and bias
    evaluation succeeded.

    Raises:
        CellFailedError: if correction was requested and failed in every replication
    """
    n = require_count("n", n, 2)
    R = require_count("R", R, 1)
    started = time.perf_counter()
    H = hoover_closed(spec).value

    replicates = _run_chunked(
        _replicate_chunk,
        R,
        workers,
        lambda start, stop: (spec, n, seed, cell_index, start, stop, apply_correction),
    )
    raw = np.array([item[0] for item in replicates], dtype=float)
    ok = np.array([item[2] is None for item in replicates], dtype=bool)

    corr = np.full(R, math.nan)
    if apply_correction and ok.any():
        fitted = np.array([item[1] if item[1] is not None else math.nan for item in replicates], dtype=float)
        params = fitted[ok]
        if exact_bias:
            estimates = _run_chunked(
                _exact_bias_chunk,
                params.size,
                workers,
                lambda start, stop: (spec, n, params[start:stop].tolist(), qcfg, scfg),
            )
            bias_values = np.asarray(estimates, dtype=float)
        else:
            interpolant = bias_interpolant(spec, n, float(params.min()), float(params.max()), qcfg, scfg, workers=workers)
            bias_values = np.array([interpolant(spec.with_parameter(value), n) for value in params])
        corr[ok] = raw[ok] - bias_values
        ok &= np.isfinite(corr)

    failures = int(R - ok.sum())
    if failures:
        reasons = sorted({item[2] for item in replicates if item[2] is not None} or {"bias evaluation"})
        logger.warning("%s n=%d: %d of %d replications failed (%s)", spec, n, failures, R, ", ".join(reasons))
    if not ok.any():
        raise CellFailedError(spec, n, "fitting or bias evaluation errored in every replication")

    relbias_raw, rmse_raw, se_raw = _metrics(raw, H)
    cell = SimulationCell(
        spec=spec,
        n=n,
        R=R,
        seed=seed.value,
        cell_index=cell_index,
        H_true=H,
        relbias_raw=relbias_raw,
        rmse_raw=rmse_raw,
        se_relbias_raw=se_raw,
        failures=failures,
        mean_raw=float(np.mean(raw)),
        se_mean_raw=se_raw * H,
    )
    if apply_correction:
        corrected = corr[ok]
        cell.relbias_corr, cell.rmse_corr, cell.se_relbias_corr = _metrics(corrected, H)
        cell.mean_corr = float(np.mean(corrected))
    if compute_expectation:
        cell.expected_H_hat = expected_hoover(spec, n, qcfg, scfg).value

    cell.elapsed = time.perf_counter() - started
    logger.info(
        "cell %d %s n=%d: relbias raw %.4g corr %.4g (%.1fs)",
        cell_index,
        spec,
        n,
        cell.relbias_raw,
        cell.relbias_corr,
        cell.elapsed,
    )
    return cell


def run_grid(
    cfg: SimulationConfig,
    qcfg: QuadratureConfig = QuadratureConfig(),
    scfg: SeriesConfig = SeriesConfig(),
) -> list[SimulationCell]:
    """
    Every (spec, n) cell in grid order; cell index = spec position × len(n grid) + n position.

    A cell that raises is recorded with its error instead of aborting the grid.
    """
    cells = []
    for i, spec in enumerate(cfg.specs):
        for j, n in enumerate(cfg.sample_sizes):
            cell_index = i * len(cfg.sample_sizes) + j
            try:
                cell = run_cell(
                    spec,
                    n,
                    cfg.replications,
                    cfg.seed,
                    qcfg,
                    scfg,
                    apply_correction=cfg.apply_correction,
                    exact_bias=cfg.exact_bias,
                    workers=cfg.workers,
                    cell_index=cell_index,
                    compute_expectation=cfg.compute_expectation,
                )
            except (CellFailedError, NonConvergenceError, DomainError) as exc:
                logger.error("cell %d %s n=%d failed: %s", cell_index, spec, n, exc)
                cell = SimulationCell(
                    spec=spec,
                    n=n,
                    R=cfg.replications,
                    seed=cfg.seed.value,
                    cell_index=cell_index,
                    H_true=hoover_closed(spec).value,
                    failures=cfg.replications,
                    error=str(exc),
                )
            cells.append(cell)
    return cells
