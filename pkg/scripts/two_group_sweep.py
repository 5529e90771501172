#!/usr/bin/env python3
"""Sweep the cross-group coordination weight for two groups of sizes 3 and 5.

Writes the stable/efficient link counts, welfare columns, and the price of
anarchy over F12 in [0, 1], plus an SVG rendering of the curves.
"""

import sys
from pathlib import Path

from groupform.cli import main

OUT = Path(__file__).resolve().parent.parent / "out"
SCENARIO = Path(__file__).resolve().parent.parent / "scenarios" / "two_groups_boundary.scn"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    sys.exit(main([
        "sweep",
        "--scenario", str(SCENARIO),
        "--parameter", "F12",
        "--from", "0", "--to", "1", "--step", "0.005",
        "--out", str(OUT / "two_group_sweep.csv"),
        "--svg", str(OUT / "two_group_sweep.svg"),
    ]))
