#!/usr/bin/env python3
"""One seeded formation run for two groups of 7 in the single-bridge band,
starting from the empty network.

The trace shows links inside the groups filling in before the first
cross-group link appears: with no internal structure, a lone cross link
is worth less than it costs.
"""

import sys
from pathlib import Path

from groupform.cli import main

OUT = Path(__file__).resolve().parent.parent / "out"
SCENARIO = Path(__file__).resolve().parent.parent / "scenarios" / "two_groups_of_seven.scn"

if __name__ == "__main__":
    seed = sys.argv[1] if len(sys.argv) > 1 else "2024"
    OUT.mkdir(exist_ok=True)
    sys.exit(main([
        "dynamics",
        "--scenario", str(SCENARIO),
        "--seed", seed,
        "--out", str(OUT / f"formation_trace_{seed}.csv"),
        "--final-out", str(OUT / f"formation_final_{seed}.edges"),
        "--svg", str(OUT / f"formation_trace_{seed}.svg"),
    ]))
