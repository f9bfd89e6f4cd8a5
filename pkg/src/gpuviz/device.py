"""Software device abstraction.

The engine targets any device where one buffer is writable by compute
dispatches and readable by render passes. This build realizes that contract
with an in-process software device: device buffers are host memory owned by
the device object, compute "dispatches" are vectorized host kernels writing
through the buffer's array view, and the render pass reads the same bytes.
No copy ever sits between the two sides, which is what the instrumentation
counters verify.

Device selection honors the VIZ_DEVICE_INDEX environment variable so the
CLI surface matches multi-GPU hosts even though this process exposes a
single device.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSize, NoCapableDevice, OutOfDeviceMemory

_ALIGNMENT = 256  # worst-case binding alignment across device APIs


@dataclass
class DeviceInfo:
    index: int
    name: str
    supports_compute: bool
    supports_graphics: bool


def enumerate_devices() -> list[DeviceInfo]:
    return [DeviceInfo(0, "software-rasterizer", True, True)]


def select_device(override: int | None = None) -> DeviceInfo:
    """Pick the first compute+graphics capable device, honoring overrides.

    ``override`` beats the VIZ_DEVICE_INDEX environment variable, which
    beats the default first-capable policy.
    """
    devices = enumerate_devices()
    if override is None:
        env = os.environ.get("VIZ_DEVICE_INDEX")
        if env is not None:
            try:
                override = int(env)
            except ValueError as exc:
                raise NoCapableDevice(f"VIZ_DEVICE_INDEX={env!r} is not an integer") from exc
    if override is not None:
        matches = [d for d in devices if d.index == override]
        if not matches or not (matches[0].supports_compute and matches[0].supports_graphics):
            raise NoCapableDevice(f"device index {override} is not interop-capable")
        return matches[0]
    for dev in devices:
        if dev.supports_compute and dev.supports_graphics:
            return dev
    raise NoCapableDevice("no device supports both compute and rendering")


class DeviceBuffer:
    """A linear device memory region with an aligned byte view.

    ``data`` is the uint8 array compute kernels and the renderer share.
    Explicit host transfers go through upload()/download() so the copy
    instrumentation sees them; direct array access models in-place device
    writes and is free.
    """

    __slots__ = ("byte_size", "data", "_backing")

    def __init__(self, byte_size: int):
        if byte_size <= 0:
            raise InvalidSize("buffer size must be positive")
        try:
            # Over-allocate so the exposed view starts on a 256-byte boundary.
            self._backing = np.zeros(byte_size + _ALIGNMENT, dtype=np.uint8)
        except MemoryError as exc:
            raise OutOfDeviceMemory(f"cannot allocate {byte_size} bytes") from exc
        addr = self._backing.ctypes.data
        offset = (-addr) % _ALIGNMENT
        self.data = self._backing[offset : offset + byte_size]
        self.byte_size = byte_size

    def upload(self, offset: int, payload: bytes | bytearray | memoryview | np.ndarray) -> int:
        """Host-to-device copy; returns the byte count for accounting."""
        src = np.frombuffer(payload, dtype=np.uint8) if not isinstance(payload, np.ndarray) else payload
        src = src.reshape(-1).view(np.uint8)
        self.data[offset : offset + src.size] = src
        return int(src.size)

    def download(self, offset: int, length: int) -> bytes:
        """Device-to-host copy of ``length`` bytes starting at ``offset``."""
        return self.data[offset : offset + length].tobytes()

    def view(self, dtype: np.dtype, count: int | None = None, offset: int = 0) -> np.ndarray:
        """Zero-copy typed view over the buffer bytes."""
        raw = self.data[offset:] if offset else self.data
        arr = raw.view(dtype)
        return arr[:count] if count is not None else arr
