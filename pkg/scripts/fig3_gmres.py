#!/usr/bin/env python3
"""Convergence histories on the 80x40 mesh: stationary RAS and
RAS-preconditioned GMRES for the two reference frequencies."""
import argparse
import sys

from elastic_schwarz.cli import main


def run(out_base: str) -> int:
    for omega, sub in ((1.0, "omega1"), (5.0, "omega5")):
        code = main(
            ["gmres", "--out", f"{out_base}/{sub}", "--omega", str(omega)]
        )
        if code != 0:
            return code
        print(f"wrote {out_base}/{sub}/gmres_history.csv and ras_history.csv")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/fig3")
    sys.exit(run(parser.parse_args().out))
