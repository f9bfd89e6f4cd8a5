"""Software rasterizer: frame assembly, camera input, image output.

A frame has two halves. The vertex half runs inside the sync layer's
buffer-read span: it snapshots view state, reads shared allocations through
zero-copy typed views and materializes projected vertex data. The raster
half (distance-field shading, depth-tested blending, presentation) touches
only that derived data, so compute may already own the buffers again while
pixels are still being filled.

Views draw in creation order with a depth test; anti-aliased fringes blend
over what is already in the framebuffer but only sufficiently opaque
fragments write depth. Two opaque views at equal depth may z-fight, which
is documented behavior, not an error.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .camera import Camera, fit_camera
from .markers import MarkerStyle, marker_coverage, marker_coverage_outlined, marker_sdf, smoothstep
from .views import (
    Domain,
    MarkerShape,
    MarkerStyleKind,
    PropertyType,
    ViewHandle,
    ViewType,
    decode_indices,
    decode_property,
)

if TYPE_CHECKING:
    from .engine import Instance

_MIN_ALPHA = 1.0 / 512.0
_MAX_QUAD_HALF = 256          # pixels; clamps runaway marker sizes
_FRAG_CHUNK = 4_000_000       # candidate fragments processed per chunk


@dataclass
class FrameStats:
    frame_index: int
    frame_time: float            # milliseconds
    presented: bool
    visible_views: tuple[int, ...]
    sim_iteration: int


class Framebuffer:
    """Off-screen color + depth target; also the presentation surface."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.color = np.zeros((height, width, 3), dtype=np.float32)
        self.depth = np.ones((height, width), dtype=np.float32)
        self._scratch = np.full(width * height, np.inf, dtype=np.float32)

    @property
    def byte_size(self) -> int:
        return self.color.nbytes + self.depth.nbytes + self._scratch.nbytes

    def clear(self) -> None:
        self.color.fill(0.0)   # opaque black
        self.depth.fill(1.0)

    def to_u8(self) -> np.ndarray:
        return np.clip(np.rint(self.color * 255.0), 0, 255).astype(np.uint8)


def write_ppm(path, framebuffer: Framebuffer) -> None:
    """Write the current color target as a binary P6 portable pixmap."""
    pixels = framebuffer.to_u8()
    with open(path, "wb") as fh:
        fh.write(f"P6\n{framebuffer.width} {framebuffer.height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def capture_frame(instance: "Instance", path) -> None:
    """Stop the render loop, render one complete frame, write it as P6.

    Snapshots must not race the live loop, which may have just cleared the
    color target; this always writes a fully rasterized frame.
    """
    instance.sync.stop_loop()
    render_frame(instance)
    write_ppm(path, instance.framebuffer)


def read_ppm(path) -> np.ndarray:
    """Parse a binary P6 file back into (H, W, 3) uint8. Test/tooling aid."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields, idx = [], 0
    while len(fields) < 4:
        while idx < len(data) and data[idx : idx + 1].isspace():
            idx += 1
        if data[idx : idx + 1] == b"#":
            while data[idx : idx + 1] not in (b"\n", b""):
                idx += 1
            continue
        start = idx
        while idx < len(data) and not data[idx : idx + 1].isspace():
            idx += 1
        fields.append(data[start:idx])
    if fields[0] != b"P6":
        raise ValueError("not a binary P6 pixmap")
    width, height = int(fields[1]), int(fields[2])
    raster = data[idx + 1 : idx + 1 + width * height * 3]
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


# -- input events -------------------------------------------------------------

@dataclass
class Drag:
    dx: float
    dy: float


@dataclass
class Scroll:
    dz: float


@dataclass
class Key:
    code: str


def handle_input(instance: "Instance", event) -> None:
    """Apply a camera input event; sampled once per frame by the renderer."""
    with instance._lock:
        cam = _ensure_camera(instance)
        if isinstance(event, Drag):
            cam.orbit(event.dx, event.dy)
        elif isinstance(event, Scroll):
            cam.zoom(event.dz)
        elif isinstance(event, Key):
            if event.code.upper() == "R" and instance._fit_camera is not None:
                instance.camera = _copy_camera(instance._fit_camera)
        else:
            raise TypeError(f"unknown input event {event!r}")


def _copy_camera(cam: Camera) -> Camera:
    return Camera(cam.target, cam.distance, cam.yaw, cam.pitch, cam.fov_y, cam.near, cam.far)


# -- vertex stage -------------------------------------------------------------

@dataclass
class _MarkerBatch:
    centers: np.ndarray      # (M, 2) screen px
    depth: np.ndarray        # (M,)
    radius: np.ndarray       # (M,) px
    color: np.ndarray        # (M, 4)
    rotation: Optional[np.ndarray]
    style: MarkerStyle
    square: bool = False     # voxels reuse the quad path with a square SDF


@dataclass
class _EdgeBatch:
    p0: np.ndarray           # (K, 2) screen px
    p1: np.ndarray
    z0: np.ndarray
    z1: np.ndarray
    color: np.ndarray        # (K, 4)
    linewidth: float


def _element_values(view: ViewHandle, ptype: PropertyType, count: int) -> Optional[np.ndarray]:
    """Per-element property values, applying index indirection when present."""
    prop = view.desc.properties.get(ptype)
    if prop is None:
        return None
    values = decode_property(prop)
    if prop.indices is not None:
        idx = decode_indices(prop.indices)[:count]
        return values[np.minimum(idx, prop.size - 1)]
    return values[:count]


def _positions_endpoints(view: ViewHandle) -> np.ndarray:
    """World positions per rendered element (indices resolved, z filled for 2D)."""
    prop = view.desc.properties[PropertyType.POSITION]
    values = decode_property(prop)
    if prop.indices is not None:
        idx = decode_indices(prop.indices)
        pts = values[np.minimum(idx, prop.size - 1)]
    else:
        pts = values[: view.desc.element_count]
    out = np.empty((len(pts), 3), dtype=np.float64)
    out[:, : min(pts.shape[1], 3)] = pts[:, :3]
    if pts.shape[1] == 2:
        out[:, 2] = 0.0   # 2D domain positions carry z = 0
    return out * np.asarray(view.desc.scale, dtype=np.float64)


def _view_bounds(view: ViewHandle) -> tuple[np.ndarray, np.ndarray]:
    ext = view.desc.extent
    if any(e != 0 for e in ext):
        return np.zeros(3), np.asarray(ext, dtype=np.float64)
    pts = _positions_endpoints(view)
    if len(pts) == 0:
        return np.zeros(3), np.ones(3)
    return pts.min(axis=0), pts.max(axis=0)


def _ensure_camera(instance: "Instance") -> Camera:
    """Fit the camera from visible view bounds on first use."""
    if instance.camera is None:
        los, his = [], []
        for view in instance._views_in_order():
            if view.visible:
                lo, hi = _view_bounds(view)
                los.append(lo)
                his.append(hi)
        if los:
            cam = fit_camera(np.min(los, axis=0), np.max(his, axis=0))
        else:
            cam = Camera()
        instance.camera = cam
        instance._fit_camera = _copy_camera(cam)
    return instance.camera


def _project(camera: Camera, points: np.ndarray, width: int, height: int):
    """World points to (screen xy, depth, per-unit pixel scale, valid mask)."""
    clip = camera.world_to_clip(points, width / height)
    w = clip[:, 3]
    valid = w > 1e-9
    safe_w = np.where(valid, w, 1.0)
    ndc = clip[:, :3] / safe_w[:, None]
    sx = (ndc[:, 0] * 0.5 + 0.5) * width
    sy = (0.5 - ndc[:, 1] * 0.5) * height
    depth = ndc[:, 2]
    valid &= (depth >= 0.0) & (depth <= 1.0)
    # pixels per world unit at each point's distance (for world-sized quads)
    px_per_world = camera.projection_matrix(width / height)[1, 1] * (height / 2.0) / safe_w
    return np.stack([sx, sy], axis=1), depth.astype(np.float32), px_per_world, valid


def _assemble_view(instance: "Instance", view: ViewHandle, width: int, height: int):
    desc = view.desc
    camera = instance.camera
    if desc.view_type in (ViewType.MARKERS, ViewType.VOXELS):
        pts = _positions_endpoints(view)
        count = len(pts)
        screen, depth, px_per_world, valid = _project(camera, pts, width, height)

        colors = _element_values(view, PropertyType.COLOR, count)
        if colors is None:
            rgba = np.broadcast_to(np.asarray(view.default_color, dtype=np.float32), (count, 4)).copy()
        else:
            rgba = np.ones((count, 4), dtype=np.float32)
            rgba[:, : colors.shape[1]] = colors[:count]

        sizes = _element_values(view, PropertyType.SIZE, count)
        base = sizes[:, 0].astype(np.float64) if sizes is not None else np.full(count, view.default_size)

        if desc.view_type is ViewType.MARKERS:
            radius = base                       # marker sizes are in pixels
            square = False
            rot_vals = _element_values(view, PropertyType.ROTATION, count)
            rotation = rot_vals[:, 0].astype(np.float64) if rot_vals is not None else None
            style = MarkerStyle(desc.options.shape, desc.options.style,
                                max(desc.linewidth, 1.0), 1.0)
        else:
            radius = 0.5 * base * px_per_world  # voxel sizes are in world units
            square = True
            rotation = None
            style = MarkerStyle(MarkerShape.DISC, MarkerStyleKind.FILLED, 1.0, 1.0)

        keep = valid & (radius > 0.0)
        rotation = rotation[keep] if rotation is not None else None
        return _MarkerBatch(screen[keep], depth[keep], radius[keep], rgba[keep], rotation, style, square)

    # Edges: endpoints either implicit pairs or resolved through indices.
    pts = _positions_endpoints(view)
    screen, depth, _, valid = _project(camera, pts, width, height)
    if desc.properties[PropertyType.POSITION].indices is not None and len(pts) % 3 == 0:
        # Triples are interpreted as closed triangle loops (wireframe).
        tri = np.arange(len(pts)).reshape(-1, 3)
        a = tri[:, [0, 1, 2]].reshape(-1)
        b = tri[:, [1, 2, 0]].reshape(-1)
    else:
        a = np.arange(0, len(pts) - 1, 2)
        b = a + 1
    seg_ok = valid[a] & valid[b]
    a, b = a[seg_ok], b[seg_ok]
    colors = _element_values(view, PropertyType.COLOR, len(pts))
    if colors is None:
        rgba = np.broadcast_to(np.asarray(view.default_color, dtype=np.float32), (len(a), 4)).copy()
    else:
        rgba = np.ones((len(a), 4), dtype=np.float32)
        rgba[:, : colors.shape[1]] = colors[a]
    return _EdgeBatch(screen[a], screen[b], depth[a], depth[b], rgba, max(view.desc.linewidth, 1.0))


# -- raster stage -------------------------------------------------------------

def _blend(fb: Framebuffer, idx: np.ndarray, z: np.ndarray, rgb: np.ndarray, alpha: np.ndarray) -> None:
    """Depth-tested alpha blend of a fragment batch into the framebuffer."""
    if idx.size == 0:
        return
    scratch = fb._scratch
    np.minimum.at(scratch, idx, z)
    flat_depth = fb.depth.reshape(-1)
    keep = (z <= scratch[idx]) & (z <= flat_depth[idx])
    scratch[idx] = np.inf    # reset touched scratch entries only
    if not keep.any():
        return
    idx, z, rgb, alpha = idx[keep], z[keep], rgb[keep], alpha[keep]
    flat_color = fb.color.reshape(-1, 3)
    dst = flat_color[idx]
    flat_color[idx] = rgb * alpha[:, None] + dst * (1.0 - alpha[:, None])
    opaque = alpha > 0.5
    flat_depth[idx[opaque]] = z[opaque]


def _raster_markers(fb: Framebuffer, batch: _MarkerBatch) -> None:
    n = len(batch.centers)
    if n == 0:
        return
    band = batch.style.antialias_band
    half_int = int(np.clip(np.ceil(batch.radius.max() + band), 1, _MAX_QUAD_HALF))
    side = 2 * half_int + 1
    offsets = np.arange(-half_int, half_int + 1)
    oy, ox = np.meshgrid(offsets, offsets, indexing="ij")
    ox = ox.reshape(-1)
    oy = oy.reshape(-1)
    chunk = max(1, _FRAG_CHUNK // (side * side))
    outlined = batch.style.style is MarkerStyleKind.OUTLINED
    stroke_color = np.zeros(3, dtype=np.float32)

    for start in range(0, n, chunk):
        sl = slice(start, start + chunk)
        cx, cy = batch.centers[sl, 0], batch.centers[sl, 1]
        bx = np.floor(cx).astype(np.int64)
        by = np.floor(cy).astype(np.int64)
        ix = bx[:, None] + ox[None, :]
        iy = by[:, None] + oy[None, :]
        dx = (ix + 0.5) - cx[:, None]
        dy = (iy + 0.5) - cy[:, None]
        if batch.rotation is not None and batch.style.shape is MarkerShape.ARROW:
            ang = batch.rotation[sl][:, None]
            c, s = np.cos(ang), np.sin(ang)
            dx, dy = c * dx + s * dy, -s * dx + c * dy
        r = batch.radius[sl][:, None]
        if batch.square:
            sdf = np.maximum(np.abs(dx), np.abs(dy)) - r
            alpha = 1.0 - smoothstep(-band / 2.0, band / 2.0, sdf)
            rgb = np.broadcast_to(batch.color[sl, None, :3], sdf.shape + (3,))
        else:
            sdf = marker_sdf(batch.style.shape, dx, dy, r)
            if outlined:
                fill_a, stroke_a = marker_coverage_outlined(sdf, batch.style)
                alpha = stroke_a + fill_a * (1.0 - stroke_a)
                safe = np.maximum(alpha, 1e-9)
                rgb = (
                    stroke_color[None, None, :] * stroke_a[..., None]
                    + batch.color[sl, None, :3] * (fill_a * (1.0 - stroke_a))[..., None]
                ) / safe[..., None]
            else:
                alpha = marker_coverage(sdf, batch.style)
                rgb = np.broadcast_to(batch.color[sl, None, :3], sdf.shape + (3,))
        alpha = alpha * batch.color[sl, None, 3]

        good = (alpha > _MIN_ALPHA) & (ix >= 0) & (ix < fb.width) & (iy >= 0) & (iy < fb.height)
        if not good.any():
            continue
        z = np.broadcast_to(batch.depth[sl][:, None], sdf.shape)[good]
        flat = (iy * fb.width + ix)[good]
        _blend(fb, flat, z.astype(np.float32),
               np.ascontiguousarray(rgb[good], dtype=np.float32),
               alpha[good].astype(np.float32))


def _raster_edges(fb: Framebuffer, batch: _EdgeBatch) -> None:
    k = len(batch.p0)
    if k == 0:
        return
    lengths = np.hypot(*(batch.p1 - batch.p0).T)
    samples = int(np.clip(np.ceil(lengths.max()) + 1, 2, 512))
    t = np.linspace(0.0, 1.0, samples)
    px = batch.p0[:, 0, None] + (batch.p1[:, 0] - batch.p0[:, 0])[:, None] * t
    py = batch.p0[:, 1, None] + (batch.p1[:, 1] - batch.p0[:, 1])[:, None] * t
    z = batch.z0[:, None] + (batch.z1 - batch.z0)[:, None] * t
    rgb = np.broadcast_to(batch.color[:, None, :3], (k, samples, 3))
    alpha = np.broadcast_to(batch.color[:, 3, None], (k, samples))
    reach = max(0, int(np.ceil(batch.linewidth / 2.0)) - 1)
    for offx in range(-reach, reach + 1):
        for offy in range(-reach, reach + 1):
            ix = np.floor(px).astype(np.int64) + offx
            iy = np.floor(py).astype(np.int64) + offy
            good = (ix >= 0) & (ix < fb.width) & (iy >= 0) & (iy < fb.height)
            _blend(
                fb,
                (iy * fb.width + ix)[good],
                z[good].astype(np.float32),
                np.ascontiguousarray(rgb[good], dtype=np.float32),
                alpha[good].astype(np.float32),
            )


# -- frame assembly -----------------------------------------------------------

def render_frame(instance: "Instance") -> FrameStats:
    """Render and present one frame of all visible views."""
    start = time.perf_counter()
    fb = instance.framebuffer
    sync = instance.sync

    with sync.frame_read_span():
        with instance._lock:
            _ensure_camera(instance)
            visible = [v for v in instance._views_in_order() if v.visible and v.alive]
            visible_ids = tuple(v.id for v in visible)
            sim_iteration = sync.counters.critical_sections_completed
            batches = [_assemble_view(instance, v, fb.width, fb.height) for v in visible]

    fb.clear()
    for batch in batches:
        if isinstance(batch, _MarkerBatch):
            _raster_markers(fb, batch)
        else:
            _raster_edges(fb, batch)

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    stats = FrameStats(
        frame_index=sync.counters.frames_presented,
        frame_time=max(elapsed_ms, 1e-6),
        presented=True,
        visible_views=visible_ids,
        sim_iteration=sim_iteration,
    )
    with instance._lock:
        sync.counters.frames_presented += 1
        instance.metrics.frames.append(stats)
    return stats
