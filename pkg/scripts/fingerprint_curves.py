#!/usr/bin/env python3
"""Regenerate the fingerprint and multimodal-radius data sets.

Writes CSVs under out/ for plotting: the circular fingerprint, elliptical
shifts for a few price peaks, superelliptical skews, and the perturbed
radius for alpha 4, 6, 8.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from polarpool.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run():
    OUT.mkdir(exist_ok=True)
    main(["fingerprint", "--mode", "ccmm", "--out", str(OUT / "fingerprint_circle.csv")])
    for c in ("0.5", "2", "4"):
        main([
            "fingerprint", "--mode", "cemm", "--c", c,
            "--out", str(OUT / f"fingerprint_ellipse_c{c}.csv"),
        ])
    for alpha in ("4", "10"):
        main([
            "fingerprint", "--mode", "csemm", "--alpha", alpha,
            "--out", str(OUT / f"fingerprint_super_a{alpha}.csv"),
        ])
    for alpha_mm in ("4", "6", "8"):
        main([
            "fingerprint", "--mode", "multimodal", "--alpha-mm", alpha_mm,
            "--samples", "721",
            "--out", str(OUT / f"multimodal_radius_a{alpha_mm}.csv"),
        ])
    print(f"wrote {len(list(OUT.glob('*.csv')))} files to {OUT}")


if __name__ == "__main__":
    run()
