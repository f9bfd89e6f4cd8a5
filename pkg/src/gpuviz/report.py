"""Figure generation from benchmark CSV output.

Renders throughput, frame-time and memory summaries next to the delimited
data so a benchmark sweep leaves both machine-readable rows and plots.
"""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .bench import BenchRecord, read_csv

_MODE_ORDER = ["base", "sync", "desync", "hostcopy"]


def _by_mode(records: list[BenchRecord]) -> dict[str, list[BenchRecord]]:
    groups: dict[str, list[BenchRecord]] = defaultdict(list)
    for rec in records:
        groups[rec.mode].append(rec)
    for recs in groups.values():
        recs.sort(key=lambda r: r.n)
    return groups


def _plot_per_mode(ax, groups, value, ylabel, log_y=False):
    any_positive = False
    for mode in _MODE_ORDER:
        recs = groups.get(mode)
        if not recs:
            continue
        values = [value(r) for r in recs]
        any_positive |= any(v > 0 for v in values)
        ax.plot([r.n for r in recs], values, marker="o", label=mode)
    ax.set_xscale("log")
    if log_y and any_positive:
        ax.set_yscale("log")
    ax.set_xlabel("elements (n)")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()


def render_report(records: list[BenchRecord], out_dir) -> list[str]:
    """Write summary figures for a set of benchmark records; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    groups = _by_mode(records)
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    _plot_per_mode(ax, groups, lambda r: r.measured_fps, "measured FPS")
    ax.set_title("Throughput by mode")
    path = os.path.join(out_dir, "fps_vs_n.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharex=True)
    _plot_per_mode(axes[0], groups, lambda r: r.frame_time_p50_ms, "p50 frame time (ms)", log_y=True)
    _plot_per_mode(axes[1], groups, lambda r: r.frame_time_p99_ms, "p99 frame time (ms)", log_y=True)
    axes[0].set_title("Median frame time")
    axes[1].set_title("Tail frame time")
    path = os.path.join(out_dir, "frame_times.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    _plot_per_mode(ax, groups, lambda r: r.graphics_mem_bytes / 2**20, "graphics memory (MiB)")
    ax.set_title("Library-owned device memory")
    path = os.path.join(out_dir, "memory.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    _plot_per_mode(ax, groups, lambda r: r.elapsed_total_s, "wall time (s)", log_y=True)
    ax.set_title("Total elapsed time")
    path = os.path.join(out_dir, "elapsed.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    return written


def render_report_from_csv(csv_path, out_dir) -> list[str]:
    """Convenience wrapper: read a benchmark CSV, then render_report."""
    return render_report(read_csv(csv_path), out_dir)
