#!/usr/bin/env python3
"""25 sweeps of the two-subdomain Schwarz iteration on the 80x40 mesh:
slow convergence with a single-bump interface mode at omega=1, divergence
at omega=5.  Writes the per-iteration history and the final error field."""
import argparse
import sys

from elastic_schwarz.cli import main


def run(out_base: str) -> int:
    for omega, sub in ((1.0, "omega1"), (5.0, "omega5")):
        code = main(
            ["schwarz", "--out", f"{out_base}/{sub}", "--omega", str(omega)]
        )
        if code != 0:
            return code
        print(f"wrote {out_base}/{sub}/schwarz_history.csv (+ final field)")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/error_modes")
    sys.exit(run(parser.parse_args().out))
