"""Figure rendering for the CLI report path.

Whenever a JSON report or benchmark CSV is written, companion PNG
figures land next to it: cost/PSNR trajectories, a noisy/denoised
panel, the contrast-enhanced difference image, and a PSNR bar chart
for benchmark tables.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .noise import difference_image
from .report import DenoiseReport


def save_report_figures(
    report: DenoiseReport,
    report_path,
    noisy: np.ndarray,
    denoised: np.ndarray,
    clean: np.ndarray | None = None,
    diff_gain: float = 10.0,
) -> list[Path]:
    """Render figures alongside a JSON report; returns the paths written."""
    stem = Path(report_path).with_suffix("")
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    iters = np.arange(1, len(report.cost_trajectory) + 1)
    ax.semilogy(iters, report.cost_trajectory, marker="o", ms=3)
    ax.set_xlabel("iteration")
    ax.set_ylabel("cost")
    ax.set_title(f"{report.method}: cost trajectory")
    ax.grid(True, alpha=0.3)
    if report.psnr_trajectory:
        ax2 = ax.twinx()
        ax2.plot(iters, report.psnr_trajectory, color="tab:red", lw=1)
        ax2.set_ylabel("PSNR (dB)", color="tab:red")
    fig.tight_layout()
    written.append(_save(fig, f"{stem}_cost.png"))

    panels = [("noisy", noisy), ("denoised", denoised)]
    if clean is not None:
        panels.append(
            (f"|clean - denoised| x{diff_gain:g}",
             difference_image(clean, denoised, diff_gain))
        )
    fig, axes = plt.subplots(1, len(panels), figsize=(3.2 * len(panels), 3.4))
    for axis, (title, img) in zip(np.atleast_1d(axes), panels):
        axis.imshow(np.clip(img, 0.0, 1.0), cmap="gray", vmin=0.0, vmax=1.0)
        axis.set_title(title, fontsize=9)
        axis.axis("off")
    fig.tight_layout()
    written.append(_save(fig, f"{stem}_images.png"))
    return written


def save_benchmark_figure(rows: list[dict], csv_path) -> Path | None:
    """Grouped PSNR bars per (image, noise) entry, one group per method."""
    if not rows:
        return None
    labels = sorted({f"{r['image']}\n{r['noise_kind']}={r['noise_level']}"
                     for r in rows})
    methods = sorted({r["method"] for r in rows})
    x = np.arange(len(labels))
    width = 0.8 / max(len(methods), 1)
    fig, ax = plt.subplots(figsize=(max(5, 1.4 * len(labels)), 3.8))
    for j, method in enumerate(methods):
        vals = []
        for lab in labels:
            match = [r for r in rows
                     if f"{r['image']}\n{r['noise_kind']}={r['noise_level']}" == lab
                     and r["method"] == method]
            vals.append(match[0]["psnr_denoised"] if match else np.nan)
        ax.bar(x + j * width, vals, width, label=method)
    noisy_vals = []
    for lab in labels:
        match = [r for r in rows
                 if f"{r['image']}\n{r['noise_kind']}={r['noise_level']}" == lab]
        noisy_vals.append(match[0]["psnr_noisy"] if match else np.nan)
    ax.plot(x + 0.4 - width / 2, noisy_vals, "k_", ms=14, label="noisy input")
    ax.set_xticks(x + 0.4 - width / 2)
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("PSNR (dB)")
    ax.legend(fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return _save(fig, f"{Path(csv_path).with_suffix('')}_psnr.png")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
