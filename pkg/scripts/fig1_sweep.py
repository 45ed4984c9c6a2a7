#!/usr/bin/env python3
"""Wavenumber sweeps of the mode-iteration eigenvalue moduli for the two
reference frequencies, showing the stagnant / divergent / contractive bands."""
import argparse
import sys

from elastic_schwarz.cli import main


def run(out_base: str) -> int:
    for omega, sub in ((1.0, "omega1"), (5.0, "omega5")):
        code = main(
            [
                "sweep",
                "--out", f"{out_base}/{sub}",
                "--omega", str(omega),
                "--k-min", "0",
                "--k-max", str(3.0 * omega / 0.5),
                "--k-count", "601",
            ]
        )
        if code != 0:
            return code
        print(f"wrote {out_base}/{sub}/sweep.csv")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/fig1")
    sys.exit(run(parser.parse_args().out))
