"""Scaling figures and fit tables from bench CSV output.

For each (family, d) group the evaluation counts are plotted against
log2(1/delta) together with a power-law fit of evaluations in that
quantity; the fitted exponents land near the nesting depth of the
solver (2 for the 2D solvers, d for the recursive one).  Figures are
PNG files written next to a fits.csv summary.
"""
from __future__ import annotations

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InputError


def _delta_exponent(text: str) -> int:
    if not text.startswith("2^"):
        raise InputError(f"bad delta field {text!r}")
    return -int(text[2:])


def load_bench_rows(path: str):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InputError(f"{path} holds no bench rows")
    return rows


def fit_exponent(ks, evals):
    """Least-squares slope of log evaluations against log log2(1/delta)."""
    xs = np.log(np.asarray(ks, dtype=float))
    ys = np.log(np.asarray(evals, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(np.exp(intercept))


def render_bench_report(bench_csv: str, out_dir: str):
    rows = load_bench_rows(bench_csv)
    os.makedirs(out_dir, exist_ok=True)
    groups = defaultdict(list)
    for row in rows:
        groups[(row["family"], int(row["d"]))].append(
            (_delta_exponent(row["delta"]), int(row["evaluations"])))

    written = []
    fits = []
    for (family, d), pts in sorted(groups.items()):
        pts.sort()
        ks = [k for k, _ in pts]
        evals = [e for _, e in pts]
        slope, coeff = fit_exponent(ks, evals)
        fits.append({"family": family, "d": d, "exponent": f"{slope:.4f}",
                     "coefficient": f"{coeff:.4f}", "rows": len(pts)})

        fig, ax = plt.subplots(figsize=(5.5, 4))
        ax.scatter(ks, evals, s=18, color="#1f4e79", zorder=3, label="measured")
        grid_k = np.linspace(min(ks), max(ks), 200)
        ax.plot(grid_k, coeff * grid_k ** slope, color="#c0504d",
                label=f"fit ~ (log 1/delta)^{slope:.2f}")
        ref_exp = 2 if d <= 2 else d
        ref_scale = max(evals) / float((max(ks) + 2) ** ref_exp)
        ax.plot(grid_k, ref_scale * (grid_k + 2) ** ref_exp, "--", color="#777777",
                label=f"reference (log 1/delta + 2)^{ref_exp}")
        ax.set_xlabel("log2(1/delta)")
        ax.set_ylabel("oracle evaluations")
        ax.set_title(f"{family} (d={d})")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        png = os.path.join(out_dir, f"{family}-scaling.png")
        fig.savefig(png, dpi=150)
        plt.close(fig)
        written.append(png)

    fits_path = os.path.join(out_dir, "fits.csv")
    with open(fits_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["family", "d", "exponent",
                                                "coefficient", "rows"])
        writer.writeheader()
        writer.writerows(fits)
    written.append(fits_path)
    return written
