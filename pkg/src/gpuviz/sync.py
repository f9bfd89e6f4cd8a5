"""Compute/render synchronization contract.

The render loop runs on its own thread. With synchronization enabled, the
span where a frame reads view buffers and the user's critical compute
section (prepareViews .. updateViews) mutually exclude each other; the
expensive rasterization half of a frame works on already-fetched vertex
data and runs concurrently with compute. Disabling synchronization keeps
the memory-visibility fences but drops the mutual exclusion, letting both
sides compete; the overlap counter then records every frame whose buffer
read started inside a critical section.

Visibility toggles and default changes requested inside a critical section
are queued and applied atomically at the updateViews boundary, so no
presented frame mixes old and new states from the same section.
"""

from __future__ import annotations

import logging
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable

from .errors import (
    AlreadyDisplaying,
    DeviceLost,
    InCriticalSection,
    InvalidValue,
    NestedCriticalSection,
    NoOpenCriticalSection,
    NotDisplaying,
)

if TYPE_CHECKING:
    from .engine import Instance

logger = logging.getLogger(__name__)


class Phase(Enum):
    RENDER_TURN = "render_turn"
    COMPUTE_CRITICAL = "compute_critical"


class DisplayMode(Enum):
    IDLE = "idle"
    AUTO = "auto"
    ASYNC = "async"


@dataclass
class SyncCounters:
    frames_presented: int = 0
    critical_sections_completed: int = 0
    frames_started_during_critical: int = 0


class SyncController:
    """State machine owning the render thread and the critical sections."""

    def __init__(self, instance: "Instance"):
        self.instance = instance
        self.phase = Phase.RENDER_TURN
        self.mode = DisplayMode.IDLE
        self.sync_enabled = True
        self.target_fps = 0.0
        self.counters = SyncCounters()
        self.watchdog_seconds = 10.0
        self._cond = threading.Condition()
        self._frame_reading = False
        self._read_waiting = False
        self._pending: list[Callable[[], None]] = []
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    # -- deferred view mutations -------------------------------------------

    def apply_or_queue(self, fn: Callable[[], None]) -> None:
        """Run a view mutation now (frame-atomic) or queue it until updateViews."""
        with self._cond:
            if self.phase is Phase.COMPUTE_CRITICAL:
                self._pending.append(fn)
                return
        with self.instance._lock:
            fn()

    # -- render loop --------------------------------------------------------

    def start_loop(self, mode: DisplayMode) -> None:
        with self._cond:
            if self.mode is not DisplayMode.IDLE:
                raise AlreadyDisplaying(f"display already active in {self.mode.value} mode")
            self.mode = mode
            self.phase = Phase.RENDER_TURN
            self._stop.clear()
        self._thread = threading.Thread(target=self._render_loop, name="gpuviz-render", daemon=True)
        self._thread.start()

    def stop_loop(self) -> None:
        self._stop.set()
        with self._cond:
            self._cond.notify_all()
        if self._thread is not None and self._thread is not threading.current_thread():
            self._thread.join()
        self._thread = None
        with self._cond:
            self.mode = DisplayMode.IDLE
            self.phase = Phase.RENDER_TURN
            self._pending.clear()

    @property
    def displaying(self) -> bool:
        return self.mode is not DisplayMode.IDLE

    def _render_loop(self) -> None:
        from .render import render_frame

        next_deadline = time.monotonic()
        while not self._stop.is_set() and self.instance.is_running():
            try:
                render_frame(self.instance)
            except DeviceLost:
                logger.error("device lost; terminating render loop")
                self.instance._closed = True
                break
            fps = self.target_fps
            if fps > 0:
                now = time.monotonic()
                next_deadline = max(next_deadline + 1.0 / fps, now - 1.0 / fps)
                delay = next_deadline - now
                if delay > 0:
                    self._stop.wait(delay)
            else:
                next_deadline = time.monotonic()

    @contextmanager
    def frame_read_span(self):
        """Span during which a frame reads view buffers.

        Blocks while a critical section is open (sync on); with sync off it
        proceeds and bumps the overlap counter instead.
        """
        with self._cond:
            if self.sync_enabled:
                # Announce the pending read so compute cannot open critical
                # sections back-to-back and starve the frame forever.
                self._read_waiting = True
                while self.phase is Phase.COMPUTE_CRITICAL and not self._stop.is_set():
                    self._cond.wait(0.05)
                self._read_waiting = False
            elif self.phase is Phase.COMPUTE_CRITICAL:
                self.counters.frames_started_during_critical += 1
            self._frame_reading = True
            self._cond.notify_all()
        try:
            yield
        finally:
            with self._cond:
                self._frame_reading = False
                self._cond.notify_all()

    # -- critical sections ---------------------------------------------------

    def prepare(self, *, internal: bool = False) -> None:
        with self._cond:
            if not internal and self.mode is not DisplayMode.ASYNC:
                raise NotDisplaying("explicit sync calls need displayAsync to be active")
            if self.phase is Phase.COMPUTE_CRITICAL:
                raise NestedCriticalSection("prepareViews called twice without updateViews")
            if self.sync_enabled:
                deadline = time.monotonic() + self.watchdog_seconds
                warned = False
                while self._frame_reading or self._read_waiting:
                    if not warned and time.monotonic() > deadline:
                        logger.warning(
                            "prepareViews has waited %.0f s for a frame's buffer reads; "
                            "suspected deadlock between compute and render",
                            self.watchdog_seconds,
                        )
                        warned = True
                    self._cond.wait(0.1)
            self.phase = Phase.COMPUTE_CRITICAL

    def update(self) -> None:
        with self._cond:
            if self.phase is not Phase.COMPUTE_CRITICAL:
                raise NoOpenCriticalSection("updateViews called without an open critical section")
            pending, self._pending = self._pending, []
        # Render is stalled before its next buffer read (sync on), so the
        # queued mutations land atomically with the section's data writes.
        with self.instance._lock:
            for fn in pending:
                fn()
        with self._cond:
            self.phase = Phase.RENDER_TURN
            self.counters.critical_sections_completed += 1
            self._cond.notify_all()


# -- module-level operations (the public sync API) ---------------------------

def display(instance: "Instance", iterations: int, compute_step: Callable[[int], None]) -> None:
    """Run ``compute_step`` for ``iterations`` critical sections with display live.

    Spawns the render loop, wraps every step in an internal critical
    section, and returns after the last iteration with the display still
    running (until window close or destroyInstance).
    """
    instance._check_live()
    if iterations < 0:
        raise InvalidValue("iterations must be >= 0")
    sync = instance.sync
    sync.start_loop(DisplayMode.AUTO)
    for i in range(iterations):
        if not instance.is_running():
            break
        sync.prepare(internal=True)
        try:
            compute_step(i)
        finally:
            sync.update()


def display_async(instance: "Instance") -> None:
    """Start the render loop; caller manages critical sections explicitly."""
    instance._check_live()
    instance.sync.start_loop(DisplayMode.ASYNC)


def prepare_views(instance: "Instance") -> None:
    """Open a critical compute section (blocks out in-flight buffer reads)."""
    instance.sync.prepare()


def update_views(instance: "Instance") -> None:
    """Close the critical section; writes and queued toggles become visible."""
    instance.sync.update()


def set_target_fps(instance: "Instance", fps: float) -> None:
    """Pace presentation at ``fps`` frames per second (0 = unlimited)."""
    if fps < 0:
        raise InvalidValue("target fps must be >= 0")
    instance.sync.target_fps = float(fps)
    instance.config.target_fps = float(fps)


def set_sync_enabled(instance: "Instance", enabled: bool) -> None:
    """Toggle mutual exclusion; fences for memory visibility always remain."""
    sync = instance.sync
    with sync._cond:
        if sync.phase is Phase.COMPUTE_CRITICAL:
            raise InCriticalSection("cannot change sync mode inside a critical section")
        sync.sync_enabled = bool(enabled)
