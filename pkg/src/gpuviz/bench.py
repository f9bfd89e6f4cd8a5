"""Brownian point-cloud benchmark: modes, metrics, CSV emission.

Four execution modes cover the measurement matrix: a renderless base case
(compute only, FPS defined as zero), shared-buffer display with and without
synchronization, and a host-copy baseline that computes positions on the
host and uploads the whole buffer inside each critical section.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional

import numpy as np
import psutil

from . import rng
from .engine import EngineConfig, create_instance_with_config, destroy_instance
from .errors import InvalidConfig
from .memory import alloc_linear, write_from_host
from .render import capture_frame
from .sync import display_async, prepare_views, set_sync_enabled, update_views
from .views import (
    Domain,
    NumericKind,
    PropertyDescription,
    PropertyType,
    ViewDescription,
    ViewType,
    create_view,
    make_format,
    pipeline_variant_key,
)

# Counter streams keeping setup and per-iteration draws disjoint.
_INIT_STREAM = 0xFFFFFFFFFFFFFFFF

RESOLUTIONS = {
    "fhd": (1920, 1080),
    "qhd": (2560, 1440),
    "uhd": (3840, 2160),
}

CSV_COLUMNS = [
    "mode", "n", "width", "height", "target_fps", "measured_fps",
    "frame_time_p50_ms", "frame_time_p99_ms", "compute_time_total_s",
    "elapsed_total_s", "graphics_mem_bytes", "device_mem_total_bytes",
    "iterations_completed",
]


class BenchMode(Enum):
    BASE = "base"
    SYNC = "sync"
    DESYNC = "desync"
    HOSTCOPY = "hostcopy"


@dataclass
class BenchConfig:
    n: int
    iterations: int
    mode: BenchMode = BenchMode.SYNC
    width: int = 1920
    height: int = 1080
    target_fps: float = 0.0
    seed: int = 0
    sigma: float = 0.002          # step stddev, in units of the unit box
    extent: float = 1.0
    marker_size: float = 1.5      # pixels
    out_path: Optional[str] = None
    headless: bool = True
    snapshot: Optional[str] = None
    dump_shaders: bool = False

    def validate(self) -> None:
        if self.n < 1:
            raise InvalidConfig("n must be >= 1")
        if self.iterations < 1:
            raise InvalidConfig("iterations must be >= 1")
        if self.sigma < 0:
            raise InvalidConfig("sigma must be >= 0")


@dataclass
class BenchRecord:
    mode: str
    n: int
    width: int
    height: int
    target_fps: float
    measured_fps: float
    frame_time_p50_ms: float
    frame_time_p99_ms: float
    compute_time_total_s: float
    elapsed_total_s: float
    graphics_mem_bytes: int
    device_mem_total_bytes: int
    iterations_completed: int


def parse_resolution(text: str) -> tuple[int, int]:
    """'fhd'/'qhd'/'uhd' or explicit '<W>x<H>'."""
    key = text.strip().lower()
    if key in RESOLUTIONS:
        return RESOLUTIONS[key]
    try:
        w, h = key.split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise InvalidConfig(f"cannot parse resolution {text!r}") from exc


# -- kernels ------------------------------------------------------------------

def init_random_positions(seed: int, n: int, extent: float = 1.0) -> np.ndarray:
    """(n, 3) float32 positions uniform in [0, extent]^3, deterministic in seed."""
    counters = np.arange(n * 3, dtype=np.uint64)
    u = rng.uniform01(seed, _INIT_STREAM, counters)
    return (u.reshape(n, 3) * extent).astype(np.float32)


def brownian_step(positions: np.ndarray, n: int, sigma: float, iteration: int, seed: int) -> np.ndarray:
    """Reference Brownian update: coordinate += sigma * N(0,1).

    The normal draw for (point i, axis a) at a given iteration comes from
    counter i*3 + a on stream ``iteration``, so host re-runs and device
    twins reproduce the sequence exactly. No boundary clamping.
    """
    out = np.array(positions[:n], dtype=np.float32, copy=True)
    brownian_step_inplace(out, sigma, iteration, seed)
    return out


def brownian_step_inplace(positions: np.ndarray, sigma: float, iteration: int, seed: int) -> None:
    """In-place variant used as the dispatch writing a shared buffer."""
    if sigma == 0.0:
        return
    n = len(positions)
    counters = np.arange(n * 3, dtype=np.uint64)
    z = rng.standard_normal(seed, iteration, counters).reshape(n, 3)
    positions += (sigma * z).astype(np.float32)


# -- metrics ------------------------------------------------------------------

def sample_memory_usage(instance=None) -> tuple[int, int]:
    """(graphics bytes owned by the library, total device memory in use)."""
    graphics = instance.graphics_memory_bytes() if instance is not None else 0
    try:
        total = psutil.Process(os.getpid()).memory_info().rss
    except Exception:
        total = 0
    return graphics, total


def _percentile(values: list[float], q: float) -> float:
    return float(np.percentile(np.asarray(values), q)) if values else 0.0


# -- benchmark driver ---------------------------------------------------------

def run_benchmark(config: BenchConfig) -> BenchRecord:
    """Execute one benchmark configuration; appends a CSV row when out_path set."""
    config.validate()
    if config.mode is BenchMode.BASE:
        record = _run_base(config)
    else:
        record = _run_displayed(config)
    if config.out_path:
        write_csv([record], config.out_path)
    return record


def _warmup_iterations(iterations: int) -> int:
    # The nominal 10-iteration warm-up shrinks with short runs so a
    # measurement window always remains.
    return min(10, iterations // 10)


def _run_base(config: BenchConfig) -> BenchRecord:
    positions = init_random_positions(config.seed, config.n, config.extent)
    start = time.perf_counter()
    compute_total = 0.0
    for i in range(config.iterations):
        t0 = time.perf_counter()
        brownian_step_inplace(positions, config.sigma, i, config.seed)
        compute_total += time.perf_counter() - t0
    elapsed = time.perf_counter() - start
    _, device_total = sample_memory_usage(None)
    return BenchRecord(
        mode=config.mode.value, n=config.n, width=config.width, height=config.height,
        target_fps=config.target_fps, measured_fps=0.0,
        frame_time_p50_ms=0.0, frame_time_p99_ms=0.0,
        compute_time_total_s=compute_total, elapsed_total_s=elapsed,
        graphics_mem_bytes=0, device_mem_total_bytes=device_total,
        iterations_completed=config.iterations,
    )


def _run_displayed(config: BenchConfig) -> BenchRecord:
    instance = create_instance_with_config(EngineConfig(
        width=config.width, height=config.height, target_fps=config.target_fps,
        headless=config.headless, seed=config.seed,
    ))
    try:
        region, alloc = alloc_linear(instance, 12 * config.n)
        device_positions = region.view(np.float32).reshape(config.n, 3)

        host_positions = None
        if config.mode is BenchMode.HOSTCOPY:
            host_positions = init_random_positions(config.seed, config.n, config.extent)
            device_positions[:] = host_positions
        else:
            device_positions[:] = init_random_positions(config.seed, config.n, config.extent)

        desc = ViewDescription(
            view_type=ViewType.MARKERS,
            domain=Domain.DOMAIN_3D,
            element_count=config.n,
            extent=(config.extent, config.extent, config.extent),
            default_size=config.marker_size,
            properties={PropertyType.POSITION: PropertyDescription(
                source=alloc, size=config.n, format=make_format(NumericKind.FLOAT, 32, 3),
            )},
        )
        create_view(instance, desc)
        if config.dump_shaders:
            print(pipeline_variant_key(desc))

        display_async(instance)
        if config.mode is BenchMode.DESYNC:
            set_sync_enabled(instance, False)

        warmup = _warmup_iterations(config.iterations)
        compute_total = 0.0
        start = time.perf_counter()
        mark_time = start
        mark_frames = instance.sync.counters.frames_presented
        mark_frame_idx = len(instance.metrics.frames)

        for i in range(config.iterations):
            if config.mode is BenchMode.HOSTCOPY:
                t0 = time.perf_counter()
                brownian_step_inplace(host_positions, config.sigma, i, config.seed)
                prepare_views(instance)
                write_from_host(alloc, 0, host_positions)
                update_views(instance)
                compute_total += time.perf_counter() - t0
            else:
                prepare_views(instance)
                t0 = time.perf_counter()
                brownian_step_inplace(device_positions, config.sigma, i, config.seed)
                compute_total += time.perf_counter() - t0
                update_views(instance)
            if i + 1 == warmup:
                mark_time = time.perf_counter()
                mark_frames = instance.sync.counters.frames_presented
                mark_frame_idx = len(instance.metrics.frames)

        end = time.perf_counter()
        elapsed = end - start
        span = max(end - mark_time, 1e-9)
        frames = instance.sync.counters.frames_presented - mark_frames
        measured_fps = frames / span
        frame_times = [f.frame_time for f in instance.metrics.frames[mark_frame_idx:]]
        graphics_mem, device_total = sample_memory_usage(instance)

        if config.snapshot:
            capture_frame(instance, config.snapshot)

        return BenchRecord(
            mode=config.mode.value, n=config.n, width=config.width, height=config.height,
            target_fps=config.target_fps, measured_fps=measured_fps,
            frame_time_p50_ms=_percentile(frame_times, 50),
            frame_time_p99_ms=_percentile(frame_times, 99),
            compute_time_total_s=compute_total, elapsed_total_s=elapsed,
            graphics_mem_bytes=graphics_mem, device_mem_total_bytes=device_total,
            iterations_completed=config.iterations,
        )
    finally:
        destroy_instance(instance)


# -- CSV ----------------------------------------------------------------------

def write_csv(records: list[BenchRecord], path) -> None:
    """Append records; the header is written once per file."""
    need_header = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if need_header:
            writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([getattr(rec, col) for col in CSV_COLUMNS])


def read_csv(path) -> list[BenchRecord]:
    """Parse a benchmark CSV back into records."""
    types = {f.name: f.type for f in fields(BenchRecord)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for col in CSV_COLUMNS:
                t = types[col]
                kwargs[col] = row[col] if t == "str" else (int(row[col]) if t == "int" else float(row[col]))
            out.append(BenchRecord(**kwargs))
    return out
