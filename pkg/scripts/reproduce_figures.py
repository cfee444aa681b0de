"""Write trajectory and surface data for the five reference figures.

Usage: python scripts/reproduce_figures.py [OUTPUT_DIR]
"""
import os
import sys

from peakons.cli import DEMOS, main


def run(out_root: str) -> int:
    worst = 0
    for fig in sorted(DEMOS):
        code = main(["demo", fig, "--out", os.path.join(out_root, fig)])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "figures"))
