#!/usr/bin/env python3
"""Plot freespec output files.

Usage:
    python3 docs/plot.py esd.json            # histogram + overlay
    python3 docs/plot.py g.csv               # G and R along the contour
    python3 docs/plot.py conv.json           # convolved density + overlay

Requires matplotlib. Figures are written next to the input as <name>.png.
"""

import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_density(path: Path, data: dict) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(
        data["grid"],
        data["density"],
        width=(data["grid"][1] - data["grid"][0]) * 0.9 if len(data["grid"]) > 1 else 0.1,
        alpha=0.6,
        label="density",
    )
    if data.get("overlay"):
        ax.plot(data["grid"], data["overlay"], "r-", lw=1.5, label="overlay")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend()
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def plot_transform_rows(path: Path, rows: list) -> None:
    xs = [r["x"] for r in rows]
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(xs, [r["re_g"] for r in rows], label="Re G")
    axes[0].plot(xs, [r["im_g"] for r in rows], label="Im G")
    axes[0].set_ylabel("G(x + i eps)")
    axes[0].legend()
    axes[1].plot(xs, [r["re_r"] for r in rows], label="Re R")
    axes[1].plot(xs, [r["im_r"] for r in rows], label="Im R")
    axes[1].set_xlabel("x")
    axes[1].set_ylabel("R at w = G(x + i eps)")
    axes[1].legend()
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    path = Path(sys.argv[1])
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        if "rows" in data:
            plot_transform_rows(path, data["rows"])
        else:
            plot_density(path, data)
    else:
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        if "re_g" in rows[0]:
            plot_transform_rows(path, [{k: float(v) for k, v in r.items()} for r in rows])
        else:
            data = {
                "grid": [float(r["x"]) for r in rows],
                "density": [float(r["density"]) for r in rows],
            }
            if "overlay" in rows[0]:
                data["overlay"] = [float(r["overlay"]) for r in rows]
            plot_density(path, data)


if __name__ == "__main__":
    main()
