#!/usr/bin/env python3
"""Predicted cross-link counts as the 20-person society splits into two
groups of varying sizes, at a fixed cross weight of 0.25.

The count depends only on the smaller group, so the curve is symmetric
about the even split and peaks there.
"""

import sys
from pathlib import Path

from groupform.cli import main

OUT = Path(__file__).resolve().parent.parent / "out"
SCENARIO = Path(__file__).resolve().parent.parent / "scenarios" / "size_split.scn"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    sys.exit(main([
        "sweep",
        "--scenario", str(SCENARIO),
        "--parameter", "s1",
        "--from", "3", "--to", "17", "--step", "1",
        "--out", str(OUT / "size_split_sweep.csv"),
        "--svg", str(OUT / "size_split_sweep.svg"),
    ]))
