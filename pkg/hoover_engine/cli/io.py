"""
Input parsing and output writers for the command line.

Samples are read from a file (one value per line), from stdin ("-") or
from an inline comma-separated list. Simulation grids are JSON documents
validated with pydantic. Results are written as JSON, CSV or plain text
with 12 significant digits.
"""

import csv
import io
import json
import math
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO

import pydantic
from pydantic import BaseModel

from .. import __version__
from ..core.distributions import Family, Seed, parse_spec
from ..core.estimators import Sample
from ..core.validation import ValidationError
from ..simulation.models import CELL_COLUMNS, SimulationCell, SimulationConfig, default_workers

SIGNIFICANT_DIGITS = 12


class SampleParseError(ValidationError):
    """Raised when sample text cannot be turned into a Sample."""


# =============================================================================
# Samples
# =============================================================================

def _sample_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if "," not in source and "\n" not in source and path.is_file():
        return path.read_text()
    return source


def _tokens(text: str) -> list[str]:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(piece.strip() for piece in line.split(","))
    return [token for token in tokens if token]


def read_sample(source: str, family: Optional[Family] = None) -> Sample:
    """
    Parse a path, "-" (stdin) or inline list into a Sample.

    With a discrete family, every value must be an integer.

    Raises:
        SampleParseError: non-numeric token, negative or non-finite value,
            fewer than 2 values, or a non-integer under a discrete family
    """
    values = []
    for token in _tokens(_sample_text(source)):
        try:
            value = float(token)
        except ValueError:
            raise SampleParseError("sample", "Non-numeric token", token)
        if not math.isfinite(value):
            raise SampleParseError("sample", "Value must be finite", token)
        if value < 0:
            raise SampleParseError("sample", "Negative value", value)
        if family is not None and family.is_discrete and value != math.floor(value):
            raise SampleParseError("sample", f"Non-integer value under the {family.value} family", value)
        values.append(value)

    if len(values) < 2:
        raise SampleParseError("sample", "Need at least 2 values", len(values))
    return Sample.of(values)


# =============================================================================
# Simulation config
# =============================================================================

class SimulationConfigInput(BaseModel):
    dists: list[str]
    sample_sizes: list[int]
    replications: int = 2000
    seed: int = 0
    apply_correction: bool = True
    exact_bias: bool = False
    workers: Optional[int] = None
    compute_expectation: bool = True

    def to_config(self) -> SimulationConfig:
        return SimulationConfig(
            specs=[parse_spec(text) for text in self.dists],
            sample_sizes=list(self.sample_sizes),
            replications=self.replications,
            seed=Seed(self.seed),
            apply_correction=self.apply_correction,
            exact_bias=self.exact_bias,
            workers=self.workers if self.workers is not None else default_workers(),
            compute_expectation=self.compute_expectation,
        )


def load_simulation_config(path: str, **overrides: Any) -> SimulationConfig:
    """
    Read a JSON grid document.

    overrides replace document fields when not None (e.g. workers from
    the command line).
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ValidationError("config", f"Cannot read config: {e.strerror}", path)
    except json.JSONDecodeError as e:
        raise ValidationError("config", f"Invalid JSON: {e.msg} (line {e.lineno})", path)

    if not isinstance(data, dict):
        raise ValidationError("config", "Config must be a JSON object", type(data).__name__)
    data.update({key: value for key, value in overrides.items() if value is not None})

    try:
        document = SimulationConfigInput.model_validate(data)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "config"
        raise ValidationError(location, first["msg"], first.get("input"))

    return document.to_config()


# =============================================================================
# Writers
# =============================================================================

def format_number(value: Any) -> Any:
    """Round floats to 12 significant digits; non-finite floats become None."""
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    if not math.isfinite(value):
        return None
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def round_floats(data: Any) -> Any:
    """Apply format_number through nested dicts and lists."""
    if isinstance(data, dict):
        return {key: round_floats(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [round_floats(value) for value in data]
    return format_number(data)


def _csv_cell(value: Any) -> str:
    value = format_number(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    if isinstance(value, (dict, list)):
        return json.dumps(value)
    return str(value)


def write_rows_csv(rows: list[dict], stream: TextIO, columns: Optional[list[str]] = None) -> None:
    """One CSV row per dict, columns from the first row unless given."""
    if not rows:
        return
    columns = columns or list(rows[0].keys())
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])


def write_cells_csv(cells: Iterable[SimulationCell], stream: TextIO) -> None:
    """Simulation cells in the fixed CELL_COLUMNS order."""
    write_rows_csv([cell.row() for cell in cells], stream, CELL_COLUMNS)


def write_cells_json(cells: Iterable[SimulationCell], stream: TextIO, config: Optional[SimulationConfig] = None) -> None:
    """Simulation cells with full diagnostics."""
    data = {
        "version": __version__,
        "generated_at": datetime.now().isoformat(),
        "config": config.to_dict() if config else None,
        "cells": [cell.to_dict() for cell in cells],
    }
    json.dump(round_floats(data), stream, indent=2)
    stream.write("\n")


def render_plain(payload: Any) -> str:
    """key: value lines; lists become blank-line separated blocks."""
    if isinstance(payload, list):
        return "\n\n".join(render_plain(item) for item in payload)
    if isinstance(payload, dict):
        lines = []
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(round_floats(value))
            else:
                value = _csv_cell(value)
            lines.append(f"{key}: {value}")
        return "\n".join(lines)
    return _csv_cell(payload)


def render(payload: Any, output_format: str) -> str:
    """Serialize a handler payload as json, csv or plain."""
    if output_format == "json":
        return json.dumps(round_floats(payload), indent=2)
    if output_format == "csv":
        buffer = io.StringIO()
        write_rows_csv(payload if isinstance(payload, list) else [payload], buffer)
        return buffer.getvalue().rstrip("\n")
    return render_plain(payload)
