#!/usr/bin/env python3
"""Plot metric-series CSVs produced by the ganlab runner."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

METRICS = [
    "disc_loss",
    "accuracy",
    "gen_grad_norm",
    "grad_var",
    "grad_x_norm_real",
    "grad_x_norm_fake",
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="metric-series CSV files")
    ap.add_argument("-o", "--out", default="series.png")
    ap.add_argument("--log", action="store_true", help="log-scale y axes")
    ap.add_argument("--metrics", nargs="*", default=None,
                    help="subset of columns to plot")
    args = ap.parse_args()

    frames = {path: pd.read_csv(path) for path in args.csv}
    metrics = args.metrics or [
        m for m in METRICS
        if any(f[m].notna().any() for f in frames.values())
    ]

    fig, axes = plt.subplots(len(metrics), 1, sharex=True,
                             figsize=(8, 2.2 * len(metrics)), squeeze=False)
    for ax, metric in zip(axes[:, 0], metrics):
        for path, frame in frames.items():
            ax.plot(frame["iteration"], frame[metric], label=path, lw=1.2)
        ax.set_ylabel(metric)
        if args.log and metric != "accuracy":
            ax.set_yscale("log")
        ax.grid(alpha=0.3)
    axes[-1, 0].set_xlabel("iteration")
    axes[0, 0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
