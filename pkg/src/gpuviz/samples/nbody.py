"""Gravitational N-body with ping-pong buffers and visibility toggling.

Two device buffers hold (x, y, z, mass) per body. Each iteration reads one
and writes the other, then swaps roles; the paired marker views flip
visibility in the same critical section, so every presented frame shows
exactly one fully written generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import rng
from ..engine import EngineConfig, create_instance_with_config, destroy_instance, is_running
from ..errors import InvalidConfig
from ..render import capture_frame
from ..memory import alloc_linear
from ..sync import SyncCounters, display_async, prepare_views, set_target_fps, update_views
from ..views import (
    Domain,
    NumericKind,
    PropertyDescription,
    PropertyType,
    ViewDescription,
    ViewType,
    create_view,
    make_format,
)

_INIT_STREAM = 0xFFFFFFFFFFFFFFFD


@dataclass
class NBodyState:
    """Simulation state over caller-provided (n, 4) float32 position buffers."""

    n: int
    dt: float = 0.016
    damping: float = 0.995
    softening_sq: float = 0.01
    seed: int = 0
    positions: list[np.ndarray] = field(default_factory=list)  # two ping-pong buffers
    velocities: np.ndarray = field(init=False)
    read_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfig("n must be >= 1")
        if self.dt <= 0:
            raise InvalidConfig("dt must be positive")
        if not self.positions:
            self.positions = [init_bodies(self.seed, self.n), np.zeros((self.n, 4), np.float32)]
        self.velocities = np.zeros((self.n, 3), dtype=np.float32)

    @property
    def write_index(self) -> int:
        return 1 - self.read_index

    def swap(self) -> None:
        self.read_index = self.write_index

    def momentum(self) -> np.ndarray:
        """Total linear momentum sum(m * v), in float64."""
        m = self.positions[self.read_index][:, 3].astype(np.float64)
        return (m[:, None] * self.velocities.astype(np.float64)).sum(axis=0)


def init_bodies(seed: int, n: int, extent: float = 1.0) -> np.ndarray:
    """(n, 4) float32 bodies: positions uniform in [0, extent]^3, unit mass."""
    counters = np.arange(n * 3, dtype=np.uint64)
    u = rng.uniform01(seed, _INIT_STREAM, counters).reshape(n, 3)
    out = np.empty((n, 4), dtype=np.float32)
    out[:, :3] = u * extent
    out[:, 3] = 1.0
    return out


def nbody_integrate(state: NBodyState, chunk: int = 1024) -> None:
    """One all-pairs step: read buffer -> write buffer, then damped velocities.

    a_i = sum_j m_j * d_ij / (|d_ij|^2 + eps^2)^(3/2) with d_ij = p_j - p_i;
    v <- (v + a * dt) * damping; p <- p + v * dt. Accumulation runs in
    float64 (chunked over i to bound memory) so pairwise forces cancel to
    rounding and total momentum is conserved at damping = 1.
    """
    src = state.positions[state.read_index]
    dst = state.positions[state.write_index]
    pos = src[:, :3].astype(np.float64)
    mass = src[:, 3].astype(np.float64)
    vel = state.velocities.astype(np.float64)

    accel = np.empty_like(pos)
    for start in range(0, state.n, chunk):
        sl = slice(start, start + chunk)
        d = pos[None, :, :] - pos[sl][:, None, :]          # (c, n, 3)
        r2 = (d * d).sum(axis=2) + state.softening_sq
        accel[sl] = (mass[None, :, None] * d / (r2**1.5)[:, :, None]).sum(axis=1)

    vel = (vel + accel * state.dt) * state.damping
    state.velocities = vel.astype(np.float32)
    dst[:, :3] = (pos + vel * state.dt).astype(np.float32)
    dst[:, 3] = src[:, 3]


@dataclass
class NBodyRunResult:
    positions: np.ndarray
    momentum_drift: float
    counters: SyncCounters
    frames: list
    view_ids: tuple[int, int]


def run_nbody(
    n: int,
    iterations: int,
    *,
    dt: float = 0.016,
    damping: float = 0.995,
    softening: float = 0.1,
    seed: int = 0,
    width: int = 1920,
    height: int = 1080,
    headless: bool = True,
    target_fps: float = 0.0,
    marker_size: float = 2.0,
    snapshot=None,
) -> NBodyRunResult:
    """Run the N-body sample end to end; integration writes device memory."""
    instance = create_instance_with_config(EngineConfig(
        width=width, height=height, headless=headless, target_fps=target_fps, seed=seed,
    ))
    try:
        regions, allocs, views = [], [], []
        for slot in range(2):
            region, alloc = alloc_linear(instance, 16 * n)
            regions.append(region.view(np.float32).reshape(n, 4))
            allocs.append(alloc)
            views.append(create_view(instance, ViewDescription(
                view_type=ViewType.MARKERS,
                domain=Domain.DOMAIN_3D,
                element_count=n,
                visible=slot == 0,
                default_size=marker_size,
                default_color=(0.9, 0.85, 0.6, 1.0),
                properties={PropertyType.POSITION: PropertyDescription(
                    source=alloc, size=n, format=make_format(NumericKind.FLOAT, 32, 4),
                )},
            )))

        state = NBodyState(
            n, dt=dt, damping=damping, softening_sq=softening * softening,
            seed=seed, positions=regions,
        )
        regions[0][:] = init_bodies(seed, n)
        p0 = state.momentum()

        display_async(instance)
        set_target_fps(instance, target_fps)
        for _ in range(iterations):
            if not is_running(instance):
                break
            prepare_views(instance)
            nbody_integrate(state)
            state.swap()
            views[0].toggle_visibility()
            views[1].toggle_visibility()
            update_views(instance)

        if snapshot:
            capture_frame(instance, snapshot)
        p1 = state.momentum()
        # Initial momentum is zero (bodies start at rest), so normalize by the
        # magnitude of individual momenta actually in flight, with a floor.
        mass = regions[state.read_index][:, 3].astype(np.float64)
        moving = float((mass[:, None] * np.abs(state.velocities.astype(np.float64))).sum())
        scale = max(float(np.linalg.norm(p0)), moving, 1e-12)
        drift = float(np.linalg.norm(p1 - p0)) / scale if damping == 1.0 else float("nan")
        return NBodyRunResult(
            positions=regions[state.read_index].copy(),
            momentum_drift=drift,
            counters=instance.sync.counters,
            frames=list(instance.metrics.frames),
            view_ids=(views[0].id, views[1].id),
        )
    finally:
        destroy_instance(instance)
