"""
Command-line interface: argument parsing, dispatch and I/O.
"""

from .io import (
    SampleParseError,
    SimulationConfigInput,
    load_simulation_config,
    read_sample,
    render,
    round_floats,
    write_cells_csv,
    write_cells_json,
)
from .dispatch import EXIT_CODES, CliRequest, build_parser, dispatch, exit_code_for, main

__all__ = [
    "SampleParseError",
    "SimulationConfigInput",
    "load_simulation_config",
    "read_sample",
    "render",
    "round_floats",
    "write_cells_csv",
    "write_cells_json",
    "EXIT_CODES",
    "CliRequest",
    "build_parser",
    "dispatch",
    "exit_code_for",
    "main",
]
