"""Shared allocation registry.

A shared allocation is a device buffer registered for dual access: user
compute kernels write it in place while the render pipeline reads the same
bytes every frame. The only sanctioned host transfers are write_from_host /
read_to_host, which feed the instance's transfer counters; the render path
never copies allocation bytes (asserted by the zero-copy tests).
"""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING

import numpy as np

from .device import DeviceBuffer
from .errors import InvalidSize, OutOfBounds, StillReferenced

if TYPE_CHECKING:
    from .engine import Instance

_alloc_ids = itertools.count(1)


class SharedAllocation:
    """Handle to a compute-writable, render-readable device region."""

    __slots__ = ("id", "byte_size", "buffer", "instance", "ref_count", "alive")

    def __init__(self, instance: "Instance", buffer: DeviceBuffer):
        self.id = next(_alloc_ids)
        self.byte_size = buffer.byte_size
        self.buffer = buffer
        self.instance = instance
        self.ref_count = 0  # live views referencing this allocation
        self.alive = True

    def __repr__(self) -> str:
        return f"SharedAllocation(id={self.id}, bytes={self.byte_size}, refs={self.ref_count})"


def alloc_linear(instance: "Instance", byte_size: int) -> tuple[np.ndarray, SharedAllocation]:
    """Create a linear shared allocation of exactly ``byte_size`` bytes.

    Returns the raw device region (a uint8 array usable inside compute
    kernels exactly like a natively allocated buffer) together with the
    registered handle. Contents are undefined until first write.
    """
    instance._check_live()
    if byte_size <= 0:
        raise InvalidSize("allocation size must be positive")
    buffer = DeviceBuffer(byte_size)
    alloc = SharedAllocation(instance, buffer)
    instance._register_allocation(alloc)
    return buffer.data, alloc


def write_from_host(alloc: SharedAllocation, offset: int, data) -> None:
    """Upload host bytes into [offset, offset+len(data))."""
    n = data.nbytes if isinstance(data, np.ndarray) else memoryview(data).nbytes
    if offset < 0 or offset + n > alloc.byte_size:
        raise OutOfBounds(f"write of {n} bytes at offset {offset} exceeds {alloc.byte_size}")
    copied = alloc.buffer.upload(offset, data)
    alloc.instance.metrics.host_upload_bytes += copied


def read_to_host(alloc: SharedAllocation, offset: int, length: int) -> bytes:
    """Download current device contents as bytes."""
    if offset < 0 or length < 0 or offset + length > alloc.byte_size:
        raise OutOfBounds(f"read of {length} bytes at offset {offset} exceeds {alloc.byte_size}")
    if length == 0:
        return b""
    data = alloc.buffer.download(offset, length)
    alloc.instance.metrics.host_download_bytes += length
    return data


def free_allocation(instance: "Instance", alloc: SharedAllocation) -> None:
    """Release an allocation no view references."""
    instance._check_live()
    if not alloc.alive:
        return
    if alloc.ref_count > 0:
        raise StillReferenced(f"{alloc!r} is referenced by {alloc.ref_count} live view property(ies)")
    instance._unregister_allocation(alloc)
    alloc.alive = False
