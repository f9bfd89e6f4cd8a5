"""Exception hierarchy for the engine.

Every library-raised error derives from VizError so callers can catch the
whole family with one clause. Names mirror the failure they report, not the
subsystem that raised them.
"""


class VizError(Exception):
    """Base class for all engine errors."""


class NoCapableDevice(VizError):
    """No device supports both compute dispatch and rendering."""


class SurfaceCreationFailed(VizError):
    """Windowed presentation requested but no display is available."""


class InvalidConfig(VizError):
    """Engine or view configuration violates an invariant."""


class OutOfDeviceMemory(VizError):
    """Device allocation request cannot be satisfied."""


class InvalidSize(VizError):
    """Zero or otherwise unusable allocation size."""


class OutOfBounds(VizError):
    """Byte range falls outside an allocation."""


class StillReferenced(VizError):
    """Allocation is still used by a live view."""


class InvalidFormat(VizError):
    """Format combination is not representable (e.g. 8-bit float)."""


class MissingPosition(VizError):
    """View description lacks the mandatory position property."""


class SizeMismatch(VizError):
    """Property source allocation is too small for size * format."""


class BadIndexWidth(VizError):
    """Index element size is not 1, 2 or 4 bytes."""


class ForeignAllocation(VizError):
    """Referenced allocation belongs to a different instance."""


class InvalidValue(VizError):
    """Runtime mutation value outside its allowed range."""


class AlreadyDisplaying(VizError):
    """display/displayAsync called while a display is active."""


class NotDisplaying(VizError):
    """Explicit sync call without an active async display."""


class NestedCriticalSection(VizError):
    """prepareViews called while a critical section is already open."""


class NoOpenCriticalSection(VizError):
    """updateViews called without a matching prepareViews."""


class InCriticalSection(VizError):
    """Operation not permitted while a critical section is open."""


class DeviceLost(VizError):
    """Device or surface failure; the render loop has terminated."""


class MeshParseError(VizError):
    """Malformed OBJ content; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyMesh(VizError):
    """OBJ file contained no usable geometry."""
