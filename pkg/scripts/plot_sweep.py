#!/usr/bin/env python3
"""Plot one or more sweep CSV files (as written by ``sqzmzi sweep``).

Draws the normalized phase uncertainty dphi/dphi_snl against phi on a log
y-axis, one line per (file, strategy) pair.  Divergent points (written as
``inf``) break the lines naturally.
"""

import argparse
import csv
import math
import sys
from collections import defaultdict
from pathlib import Path


def load_csv(path: Path) -> dict[str, tuple[list[float], list[float]]]:
    series: dict[str, tuple[list[float], list[float]]] = defaultdict(lambda: ([], []))
    with path.open() as handle:
        for row in csv.DictReader(handle):
            phis, values = series[row["strategy"]]
            phis.append(float(row["phi"]))
            value = float(row["dphi_normalized"])
            values.append(value if math.isfinite(value) else math.nan)
    return dict(series)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_files", nargs="+", type=Path)
    parser.add_argument("--output", "-o", type=Path, default=Path("sweep.png"))
    parser.add_argument("--title", default="phase sensitivity")
    args = parser.parse_args()

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("plotting needs matplotlib: pip install matplotlib")

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for path in args.csv_files:
        label_prefix = f"{path.stem}: " if len(args.csv_files) > 1 else ""
        for strategy, (phis, values) in sorted(load_csv(path).items()):
            ax.plot(phis, values, label=f"{label_prefix}{strategy}", linewidth=1.2)
    ax.set_yscale("log")
    ax.set_xlabel(r"$\varphi$ (rad)")
    ax.set_ylabel(r"$\Delta\varphi \,/\, \Delta\varphi_{\rm SNL}$")
    ax.set_title(args.title)
    ax.axhline(1.0, color="gray", linewidth=0.8, linestyle=":")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
