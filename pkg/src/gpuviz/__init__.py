"""Real-time visualization of simulation data living in shared device buffers.

User compute kernels write into library-managed allocations; declarative
views render that memory every frame without per-iteration host copies,
under an explicit compute/render synchronization contract.
"""

from .camera import Camera, fit_camera
from .engine import (
    EngineConfig,
    Instance,
    Metrics,
    SyncMode,
    create_instance,
    create_instance_with_config,
    destroy_instance,
    is_running,
)
from .errors import VizError
from .markers import MarkerStyle, marker_coverage, marker_coverage_outlined, marker_sdf
from .memory import SharedAllocation, alloc_linear, free_allocation, read_to_host, write_from_host
from .render import (
    Drag,
    FrameStats,
    Key,
    Scroll,
    capture_frame,
    handle_input,
    read_ppm,
    render_frame,
    write_ppm,
)
from .sync import (
    SyncCounters,
    display,
    display_async,
    prepare_views,
    set_sync_enabled,
    set_target_fps,
    update_views,
)
from .views import (
    Domain,
    FormatDescription,
    IndexDescription,
    MarkerOptions,
    MarkerShape,
    MarkerStyleKind,
    NumericKind,
    PropertyDescription,
    PropertyType,
    ViewDescription,
    ViewHandle,
    ViewType,
    create_view,
    destroy_view,
    make_format,
    make_structured_grid,
    pipeline_variant_key,
    validate_indices,
)

__all__ = [
    "Camera", "fit_camera",
    "EngineConfig", "Instance", "Metrics", "SyncMode",
    "create_instance", "create_instance_with_config", "destroy_instance", "is_running",
    "VizError",
    "MarkerStyle", "marker_coverage", "marker_coverage_outlined", "marker_sdf",
    "SharedAllocation", "alloc_linear", "free_allocation", "read_to_host", "write_from_host",
    "Drag", "FrameStats", "Key", "Scroll", "capture_frame", "handle_input",
    "read_ppm", "render_frame", "write_ppm",
    "SyncCounters", "display", "display_async", "prepare_views",
    "set_sync_enabled", "set_target_fps", "update_views",
    "Domain", "FormatDescription", "IndexDescription", "MarkerOptions", "MarkerShape",
    "MarkerStyleKind", "NumericKind", "PropertyDescription", "PropertyType",
    "ViewDescription", "ViewHandle", "ViewType",
    "create_view", "destroy_view", "make_format", "make_structured_grid",
    "pipeline_variant_key", "validate_indices",
]

__version__ = "0.1.0"
