"""
Hoover Engine

Population Hoover index, the exact finite-sample expectation and bias of
its sample estimator, and a maximum likelihood plug-in bias correction.

Packages:
  core        special functions, distributions, population index, estimators
  bias        exact E[Ĥ], bias, ML fitting and correction
  simulation  Monte Carlo study of raw vs corrected estimators
  cli         command-line surface

Usage:
    from hoover_engine.core import DistributionSpec, hoover_closed
    from hoover_engine.bias import bias, correct_hoover
"""

__version__ = "1.0.0"
