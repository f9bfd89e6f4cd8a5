"""Instance lifecycle: device selection, surface creation, registries, teardown.

An instance owns the device context, the presentation surface, the
allocation and view registries, the sync state machine and the metrics
accumulator. Everything created through an instance is destroyed no later
than the instance itself.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .camera import Camera
from .device import DeviceInfo, select_device
from .errors import InvalidConfig, StillReferenced, SurfaceCreationFailed
from .render import Framebuffer, FrameStats
from .sync import SyncController

_PER_VIEW_OVERHEAD_BYTES = 256  # uniform block per view pipeline


class SyncMode(Enum):
    SYNCHRONIZED = "synchronized"
    DESYNCHRONIZED = "desynchronized"


@dataclass
class EngineConfig:
    width: int = 1920
    height: int = 1080
    target_fps: float = 0.0          # 0 = unlimited
    headless: bool = False
    sync_mode: SyncMode = SyncMode.SYNCHRONIZED
    seed: int = 0

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise InvalidConfig(f"surface extent {self.width}x{self.height} must be >= 1x1")
        if self.target_fps < 0:
            raise InvalidConfig("target_fps must be >= 0")
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise InvalidConfig("seed must fit in 64 unsigned bits")


@dataclass
class Metrics:
    frames: list[FrameStats] = field(default_factory=list)
    host_upload_bytes: int = 0
    host_download_bytes: int = 0
    render_copy_bytes: int = 0       # must stay 0: the zero-copy contract
    allocations_created: int = 0
    allocations_freed: int = 0
    views_created: int = 0
    views_destroyed: int = 0


def _display_available() -> bool:
    return bool(os.environ.get("DISPLAY") or os.environ.get("WAYLAND_DISPLAY"))


class Instance:
    """Live engine instance; create through createInstance, not directly."""

    def __init__(self, config: EngineConfig, device: DeviceInfo):
        self.config = config
        self.device = device
        self.framebuffer = Framebuffer(config.width, config.height)
        self.metrics = Metrics()
        self.camera: Optional[Camera] = None
        self._fit_camera: Optional[Camera] = None
        self._lock = threading.RLock()
        self._allocations: dict[int, object] = {}
        self._views: dict[int, object] = {}
        self._closed = False
        self._destroyed = False
        self.sync = SyncController(self)
        self.sync.target_fps = config.target_fps
        self.sync.sync_enabled = config.sync_mode is SyncMode.SYNCHRONIZED

    # -- registry plumbing ---------------------------------------------------

    def _check_live(self) -> None:
        if self._destroyed:
            raise InvalidConfig("instance has been destroyed")

    def _register_allocation(self, alloc) -> None:
        with self._lock:
            self._allocations[alloc.id] = alloc
            self.metrics.allocations_created += 1

    def _unregister_allocation(self, alloc) -> None:
        with self._lock:
            self._allocations.pop(alloc.id, None)
            self.metrics.allocations_freed += 1

    def _owns_allocation(self, alloc) -> bool:
        return alloc is not None and alloc.alive and alloc.id in self._allocations

    def _register_view(self, view) -> None:
        with self._lock:
            self._views[view.id] = view
            self.metrics.views_created += 1

    def _unregister_view(self, view) -> None:
        with self._lock:
            self._views.pop(view.id, None)
            self.metrics.views_destroyed += 1

    def _views_in_order(self):
        return [self._views[k] for k in sorted(self._views)]

    @property
    def live_allocations(self) -> int:
        return len(self._allocations)

    @property
    def live_views(self) -> int:
        return len(self._views)

    # -- lifecycle -----------------------------------------------------------

    def is_running(self) -> bool:
        return not (self._closed or self._destroyed)

    def post_close_event(self) -> None:
        """Deliver a window-close event (never emitted in headless mode)."""
        self._closed = True

    def graphics_memory_bytes(self) -> int:
        """Bytes of library-created device resources."""
        with self._lock:
            alloc_bytes = sum(a.byte_size for a in self._allocations.values())
            return self.framebuffer.byte_size + alloc_bytes + len(self._views) * _PER_VIEW_OVERHEAD_BYTES


def create_instance(width: int, height: int) -> Instance:
    """Create a live instance with default configuration (unlimited FPS,
    synchronized mode); honors VIZ_HEADLESS and VIZ_DEVICE_INDEX."""
    return create_instance_with_config(EngineConfig(width=width, height=height))


def create_instance_with_config(config: EngineConfig) -> Instance:
    config.validate()
    headless = config.headless or os.environ.get("VIZ_HEADLESS") == "1"
    if not headless and not _display_available():
        raise SurfaceCreationFailed(
            "no display server detected; pass headless=True or set VIZ_HEADLESS=1"
        )
    cfg = EngineConfig(
        width=config.width,
        height=config.height,
        target_fps=config.target_fps,
        headless=headless,
        sync_mode=config.sync_mode,
        seed=config.seed,
    )
    device = select_device()
    return Instance(cfg, device)


def is_running(instance: Instance) -> bool:
    """False once the display window was closed or the instance destroyed."""
    return instance.is_running()


def destroy_instance(instance: Instance) -> None:
    """Join the render loop, then release views, allocations and the device.

    Idempotent: the second call is a no-op.
    """
    if instance._destroyed:
        return
    instance._closed = True
    instance.sync.stop_loop()
    from .views import destroy_view

    with instance._lock:
        views = instance._views_in_order()
    for view in views:
        destroy_view(instance, view)
    with instance._lock:
        allocs = list(instance._allocations.values())
    for alloc in allocs:
        if alloc.ref_count > 0:
            raise StillReferenced(f"{alloc!r} still referenced during teardown")
        instance._unregister_allocation(alloc)
        alloc.alive = False
    instance._destroyed = True
