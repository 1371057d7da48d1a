#!/usr/bin/env python3
"""
Hoover Engine - Command Line

Usage:
    python hoover.py SUBCOMMAND [options]

Examples:
    python hoover.py index --dist gamma:alpha=1,rate=1
    python hoover.py estimate --sample 0,2
    python hoover.py bias --dist poisson:lambda=2.5 --n 5,25
    python hoover.py simulate --config data/gamma_grid.json --format csv
"""

import sys

from hoover_engine.cli import main


if __name__ == "__main__":
    sys.exit(main())
