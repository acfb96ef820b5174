#!/usr/bin/env python3
"""Regenerate the three reference sensitivity curves as CSV files.

Writes one file per preset (10 dB input squeezing; lossless / eps^2 = 0.04 /
doubled excess noise), each sweeping the single, differential and optimal
read-outs over a 721-point phase grid.  Equivalent to running

    sqzmzi sweep --preset <name> -o <name>.csv

for every preset, but going through the library API so the script doubles as a
usage example.
"""

import argparse
from pathlib import Path

from sqzmzi.cli import PRESETS, SweepSpec, render_csv, sweep
from sqzmzi.model import InterferometerParams, Strategy, db_to_squeeze_factor


def params_from_preset(preset: dict) -> InterferometerParams:
    return InterferometerParams.with_technical_noise(
        preset["a_factor"],
        r1=db_to_squeeze_factor(preset["r1_db"]),
        mu=preset["mu"],
        eta=preset["eta"],
        n_photons=preset["n_photons"],
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", type=Path, default=Path("curves"),
                        help="directory for the CSV files (default: ./curves)")
    parser.add_argument("--points", type=int, default=721, help="phase grid size")
    args = parser.parse_args()

    strategies = (Strategy.single(), Strategy.differential(), Strategy.optimal())
    args.output_dir.mkdir(parents=True, exist_ok=True)
    for name, preset in PRESETS.items():
        spec = SweepSpec(
            params=params_from_preset(preset),
            n_points=args.points,
            strategies=strategies,
        )
        path = args.output_dir / f"{name}.csv"
        path.write_text(render_csv(sweep(spec)))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
