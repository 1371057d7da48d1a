"""
Simulation study of the raw and bias-corrected Hoover estimators.

- models: SimulationConfig, SimulationCell and the fixed CSV column order
- harness: run_cell, run_grid and the interpolated bias used per replication
"""

from .models import (
    CELL_COLUMNS,
    SimulationCell,
    SimulationConfig,
    default_workers,
    validate_simulation_config,
)
from .harness import (
    BiasInterpolant,
    CellFailedError,
    bias_interpolant,
    run_cell,
    run_grid,
)

__all__ = [
    "CELL_COLUMNS",
    "SimulationCell",
    "SimulationConfig",
    "default_workers",
    "validate_simulation_config",
    "BiasInterpolant",
    "CellFailedError",
    "bias_interpolant",
    "run_cell",
    "run_grid",
]
