"""
Command-line surface.

Subcommands:
    index        population H for a distribution
    estimate     Ĥ and Ĝ for a sample
    expectation  exact E[Ĥ] for one or more sample sizes
    bias         Bias(Ĥ, H) with its analytic bounds
    correct      bias-corrected estimate for a sample under a chosen family
    simulate     Monte Carlo grid from a JSON config
    oracle       Monte Carlo cross-checks of the exact expectation

Every subcommand writes its result to stdout (or --output). Failures are
written to stderr as JSON with a distinct exit code per error kind.
"""

import argparse
import io
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..bias.finite_sample import (
    bias_curve,
    expected_hoover,
    min_integral_gamma,
    min_tilted_oracle,
    simulate_hoover_mean,
)
from ..bias.correction import correct_hoover
from ..bias.fitting import FittingError
from ..core.distributions import DistributionSpec, Family, Seed, format_spec, parse_spec
from ..core.estimators import gini_hat, hoover_hat
from ..core.hoover import gini_gamma, hoover_index
from ..core.specnum import DomainError, NonConvergenceError, QuadratureConfig, SeriesConfig
from ..core.validation import ValidationError, require_count
from ..simulation.harness import run_grid
from .io import (
    SampleParseError,
    load_simulation_config,
    read_sample,
    render,
    write_cells_csv,
    write_cells_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1

# checked in order: SampleParseError is a ValidationError
EXIT_CODES: list[tuple[type, int]] = [
    (SampleParseError, 3),
    (ValidationError, 2),
    (DomainError, 4),
    (NonConvergenceError, 5),
    (FittingError, 6),
]

RATE_NOTE = "the gamma rate does not affect H, E[Ĥ] or the bias; results equal those for rate=1"


@dataclass
class CliRequest:
    """A parsed command line."""

    subcommand: str
    output_format: str = "json"
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliRequest":
        options = {
            key: value
            for key, value in vars(args).items()
            if key not in ("subcommand", "format", "verbose", "quiet", "output")
        }
        return cls(args.subcommand, args.format, options)


# =============================================================================
# Argument helpers
# =============================================================================

def _sample_sizes(raw: Optional[list[str]]) -> list[int]:
    if not raw:
        raise ValidationError("n", "At least one sample size is required", None)
    sizes = []
    for chunk in raw:
        for piece in chunk.split(","):
            piece = piece.strip()
            if not piece:
                continue
            try:
                value = int(piece)
            except ValueError:
                raise ValidationError("n", "Must be an integer", piece)
            sizes.append(require_count("n", value, 2))
    if not sizes:
        raise ValidationError("n", "At least one sample size is required", raw)
    return sizes


def _rate_note(spec: DistributionSpec, payload: dict) -> dict:
    if spec.family is Family.GAMMA and spec.rate != 1.0:
        logger.warning("%s: %s", format_spec(spec), RATE_NOTE)
        payload["note"] = RATE_NOTE
    return payload


def _configs() -> tuple[QuadratureConfig, SeriesConfig]:
    return QuadratureConfig.from_env(), SeriesConfig.from_env()


# =============================================================================
# Handlers
# =============================================================================

def _handle_index(options: dict) -> Any:
    spec = parse_spec(options["dist"])
    qcfg, _ = _configs()
    index = hoover_index(spec, options["method"], qcfg)
    payload = {"dist": format_spec(spec), "H": index.value, "method": index.method.value, "err_est": index.err_est}
    if spec.family is Family.GAMMA:
        payload["G"] = gini_gamma(spec.alpha).value
    return _rate_note(spec, payload)


def _handle_estimate(options: dict) -> Any:
    s = read_sample(options["sample"])
    payload = {"n": s.n, "hoover_hat": hoover_hat(s)}
    payload["gini_hat"] = gini_hat(s) if s.total > 0 else None
    return payload


def _handle_expectation(options: dict) -> Any:
    spec = parse_spec(options["dist"])
    qcfg, scfg = _configs()
    rows = []
    for n in _sample_sizes(options["n"]):
        result = expected_hoover(spec, n, qcfg, scfg)
        row = {"dist": format_spec(spec), **result.to_dict()}
        row["path"] = result.inner_diag.get("path")
        row.pop("diagnostics")
        rows.append(_rate_note(spec, row))
    return rows[0] if len(rows) == 1 else rows


def _handle_bias(options: dict) -> Any:
    spec = parse_spec(options["dist"])
    qcfg, scfg = _configs()
    rows = [_rate_note(spec, report.to_dict()) for report in bias_curve(spec, _sample_sizes(options["n"]), qcfg, scfg)]
    return rows[0] if len(rows) == 1 else rows


def _handle_correct(options: dict) -> Any:
    family = Family(options["family"])
    s = read_sample(options["sample"], family)
    qcfg, scfg = _configs()
    return correct_hoover(s, family, qcfg, scfg).to_dict()


def _handle_simulate(options: dict) -> Any:
    cfg = load_simulation_config(
        options["config"],
        workers=options.get("workers"),
        exact_bias=True if options.get("exact_bias") else None,
    )
    qcfg, scfg = _configs()
    return cfg, run_grid(cfg, qcfg, scfg)


def _handle_oracle(options: dict) -> Any:
    n = require_count("n", options["n"], 2)
    reps = require_count("reps", options["reps"], 1)
    seed = Seed(options["seed"])
    workers = options.get("workers") or 1

    if options.get("dist"):
        spec = parse_spec(options["dist"])
        hoover, gini = simulate_hoover_mean(spec, n, reps, seed, workers)
        qcfg, scfg = _configs()
        return {
            "dist": format_spec(spec),
            "n": n,
            "reps": reps,
            "seed": seed.value,
            "mc_mean_H_hat": hoover.mean,
            "mc_se_H_hat": hoover.se,
            "mc_mean_G_hat": gini.mean,
            "mc_se_G_hat": gini.se,
            "expected_H_hat": expected_hoover(spec, n, qcfg, scfg).value,
        }

    if options.get("alpha") is None:
        raise ValidationError("alpha", "oracle needs --alpha or --dist", None)
    estimate = min_tilted_oracle(options["alpha"], n, reps, seed, workers)
    qcfg, _ = _configs()
    return {
        "alpha": options["alpha"],
        "n": n,
        "reps": reps,
        "seed": seed.value,
        **estimate.to_dict(),
        "quadrature": min_integral_gamma(options["alpha"], n, qcfg).value,
    }


HANDLERS: dict[str, Callable[[dict], Any]] = {
    "index": _handle_index,
    "estimate": _handle_estimate,
    "expectation": _handle_expectation,
    "bias": _handle_bias,
    "correct": _handle_correct,
    "simulate": _handle_simulate,
    "oracle": _handle_oracle,
}


# =============================================================================
# Dispatch
# =============================================================================

def _error_payload(exc: Exception) -> dict:
    if hasattr(exc, "to_dict"):
        detail = exc.to_dict()
    else:
        detail = {"type": type(exc).__name__, "message": str(exc), "field": None}
    return {"error": detail}


def exit_code_for(exc: Exception) -> int:
    """Exit status for an exception raised by a handler."""
    for kind, code in EXIT_CODES:
        if isinstance(exc, kind):
            return code
    return EXIT_UNEXPECTED


def _render_simulation(result: tuple, output_format: str) -> str:
    cfg, cells = result
    buffer = io.StringIO()
    if output_format == "csv":
        write_cells_csv(cells, buffer)
    elif output_format == "json":
        write_cells_json(cells, buffer, cfg)
    else:
        return render([cell.to_dict() for cell in cells], "plain")
    return buffer.getvalue().rstrip("\n")


def dispatch(req: CliRequest) -> tuple[int, str]:
    """
    Run a request.

    Returns (exit status, text). On success the text is the rendered
    result; otherwise it is a JSON error document for stderr.
    """
    handler = HANDLERS.get(req.subcommand)
    if handler is None:
        exc = ValidationError("subcommand", "Unknown subcommand", req.subcommand)
        return exit_code_for(exc), json.dumps(_error_payload(exc))

    try:
        payload = handler(req.options)
        if req.subcommand == "simulate":
            return EXIT_OK, _render_simulation(payload, req.output_format)
        return EXIT_OK, render(payload, req.output_format)
    except Exception as exc:
        status = exit_code_for(exc)
        if status == EXIT_UNEXPECTED:
            logger.exception("unexpected failure in %s", req.subcommand)
        return status, json.dumps(_error_payload(exc))


# =============================================================================
# Parser and entry point
# =============================================================================

SAMPLE_HELP = "FILE, '-' for stdin, or an inline list 1,2,3"


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "plain"], default="json", help="Output format (default: json)")
    common.add_argument("--output", "-o", help="Write the result to FILE instead of stdout")
    common.add_argument("--verbose", "-v", action="count", default=0, help="More logging on stderr (repeatable)")
    common.add_argument("--quiet", action="store_true", help="Only log errors")

    parser = argparse.ArgumentParser(
        prog="hoover",
        description="Hoover index: population values, finite-sample bias and bias correction",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("index", parents=[common], help="Population Hoover index")
    p.add_argument("--dist", required=True, help="gamma:alpha=A,rate=L | poisson:lambda=L | geometric:p=P")
    p.add_argument("--method", choices=["closed_form", "generic"], default="closed_form")

    p = sub.add_parser("estimate", parents=[common], help="Ĥ and Ĝ for a sample")
    p.add_argument("--sample", required=True, help=SAMPLE_HELP)

    for name, help_text in (("expectation", "Exact E[Ĥ]"), ("bias", "Bias(Ĥ, H) and its bounds")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--dist", required=True)
        p.add_argument("--n", action="append", required=True, help="Sample size; repeat or comma-separate")

    p = sub.add_parser("correct", parents=[common], help="Bias-corrected Hoover estimate")
    p.add_argument("--sample", required=True, help=SAMPLE_HELP)
    p.add_argument("--family", required=True, choices=[family.value for family in Family])

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo study from a JSON config")
    p.add_argument("--config", required=True, help="JSON file with dists, sample_sizes, replications, seed")
    p.add_argument("--workers", type=int, help="Worker processes (default: INEQ_WORKERS or 1)")
    p.add_argument("--exact-bias", action="store_true", help="Exact bias per replication instead of the interpolant")

    p = sub.add_parser("oracle", parents=[common], help="Monte Carlo cross-checks")
    p.add_argument("--alpha", type=float, help="Gamma shape for the min{(n-1)U, V} oracle")
    p.add_argument("--dist", help="Simulate the mean of Ĥ for this distribution instead")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    return parser


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


# options whose inline value may start with a minus sign
DASH_VALUE_OPTIONS = ("--sample",)


def _attach_dash_values(argv: list[str]) -> list[str]:
    """Rewrite `--sample -1,2` as `--sample=-1,2` so argparse keeps the value."""
    joined: list[str] = []
    for token in argv:
        if joined and joined[-1] in DASH_VALUE_OPTIONS and re.match(r"-[\d.]", token):
            joined[-1] = f"{joined[-1]}={token}"
        else:
            joined.append(token)
    return joined


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_dash_values(argv))
    _configure_logging(args.verbose, args.quiet)

    status, text = dispatch(CliRequest.from_args(args))
    if status != EXIT_OK:
        print(text, file=sys.stderr)
    elif args.output:
        with open(args.output, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return status
