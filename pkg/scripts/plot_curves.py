#!/usr/bin/env python3
"""Plot the curve files of one experiment output directory.

Convenience viewer, not a tested interface: reads manifest.json, overlays all
distribution curves (or absorption curves) found there.

    python scripts/plot_curves.py runs/fig1 --even-only -o fig1.png
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load_rows(path: Path):
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        return payload["rows"]
    rows = []
    with path.open() as fh:
        next(fh)  # header
        for line in fh:
            k, v = line.strip().split(",")
            rows.append((int(k), float(v)))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run_dir", type=Path)
    parser.add_argument("--even-only", action="store_true",
                        help="drop odd positions (unoccupied in parity-preserving runs)")
    parser.add_argument("--log", action="store_true", help="log-scale the y axis")
    parser.add_argument("-o", "--output", type=Path, default=None)
    args = parser.parse_args()

    manifest = json.loads((args.run_dir / "manifest.json").read_text())
    fig, ax = plt.subplots(figsize=(8, 5))
    absorption = False
    for name, fname in sorted(manifest["files"].items()):
        rows = load_rows(args.run_dir / fname)
        absorption = manifest["curves"].get(name, {}).get("barriers") is not None
        if args.even_only and not absorption:
            rows = [(k, v) for k, v in rows if k % 2 == 0]
        xs, ys = zip(*rows)
        ax.plot(xs, ys, label=name, lw=1.2)
    ax.set_xlabel("step" if absorption else "position")
    ax.set_ylabel("cumulative absorbed" if absorption else "probability")
    if args.log:
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title(args.run_dir.name)
    out = args.output or args.run_dir / "curves.png"
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
