"""Triangle-mesh display with a breathing deformation along vertex normals.

One allocation holds the vertex positions; a marker view and an indexed
wireframe view share it. Each iteration recomputes the vertices as
rest + scale * normal and writes them in place, so both views move together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..engine import EngineConfig, create_instance_with_config, destroy_instance
from ..errors import EmptyMesh, MeshParseError
from ..memory import alloc_linear, write_from_host
from ..render import capture_frame
from ..sync import SyncCounters, display_async, prepare_views, set_target_fps, update_views
from ..views import (
    Domain,
    IndexDescription,
    NumericKind,
    PropertyDescription,
    PropertyType,
    ViewDescription,
    ViewType,
    create_view,
    make_format,
)

VARY_ANGLE_INCREMENT_DEG = 2.0


@dataclass
class Mesh:
    vertices: np.ndarray   # (V, 3) float32
    triangles: np.ndarray  # (T, 3) uint32

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)


def asset_path(name: str):
    """Path to a bundled mesh asset, e.g. 'icosphere.obj' or 'torus.obj'."""
    return resources.files(__package__).joinpath("assets", name)


def load_obj(path) -> Mesh:
    """Load a Wavefront OBJ: 'v' and 'f' records only, everything else skipped.

    Face indices are 1-based; negative values count back from the vertices
    seen so far; 'v/vt/vn' slash forms keep only the vertex index. Faces
    with more than three corners triangulate as a fan around the first.
    """
    vertices: list[tuple[float, float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v":
                if len(parts) < 4:
                    raise MeshParseError(f"vertex needs 3 coordinates: {raw.rstrip()!r}", lineno)
                try:
                    vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
                except ValueError as exc:
                    raise MeshParseError(f"bad vertex coordinate: {raw.rstrip()!r}", lineno) from exc
            elif parts[0] == "f":
                if len(parts) < 4:
                    raise MeshParseError(f"face needs at least 3 corners: {raw.rstrip()!r}", lineno)
                corners = []
                for token in parts[1:]:
                    try:
                        ref = int(token.split("/", 1)[0])
                    except ValueError as exc:
                        raise MeshParseError(f"bad face index {token!r}", lineno) from exc
                    idx = ref - 1 if ref > 0 else len(vertices) + ref
                    if not 0 <= idx < len(vertices):
                        raise MeshParseError(f"face index {ref} out of range", lineno)
                    corners.append(idx)
                for i in range(1, len(corners) - 1):
                    triangles.append((corners[0], corners[i], corners[i + 1]))
    if not vertices or not triangles:
        raise EmptyMesh(f"{path} contains no renderable triangles")
    return Mesh(
        vertices=np.asarray(vertices, dtype=np.float32),
        triangles=np.asarray(triangles, dtype=np.uint32),
    )


def compute_smooth_normals(mesh: Mesh) -> np.ndarray:
    """(V, 3) float32 unit normals: area-weighted average of face normals.

    Cross products of the un-normalized edge vectors weight each face by
    twice its area; degenerate vertices fall back to +z.
    """
    v = mesh.vertices.astype(np.float64)
    tri = mesh.triangles.astype(np.int64)
    face_n = np.cross(v[tri[:, 1]] - v[tri[:, 0]], v[tri[:, 2]] - v[tri[:, 0]])
    acc = np.zeros_like(v)
    for corner in range(3):
        np.add.at(acc, tri[:, corner], face_n)
    norms = np.linalg.norm(acc, axis=1)
    degenerate = norms < 1e-12
    acc[degenerate] = (0.0, 0.0, 1.0)
    norms[degenerate] = 1.0
    return (acc / norms[:, None]).astype(np.float32)


def breathe_deform(rest: np.ndarray, normals: np.ndarray, scale: float) -> np.ndarray:
    """Displace every vertex along its normal: rest + scale * normal."""
    return (rest.astype(np.float64) + scale * normals.astype(np.float64)).astype(np.float32)


def vary_angle(degrees: float, amplitude: float = 0.2,
               increment: float = VARY_ANGLE_INCREMENT_DEG) -> tuple[float, float]:
    """One oscillator tick: returns (scale, advanced angle).

    scale = amplitude * sin(radians(degrees)); the angle advances by a fixed
    increment per call, so a 360/increment-call sweep returns to the start.
    """
    return amplitude * math.sin(math.radians(degrees)), degrees + increment


@dataclass
class MeshRunResult:
    vertices: np.ndarray
    counters: SyncCounters
    degrees: float


def run_mesh(
    obj_path,
    *,
    amplitude: float = 0.2,
    iterations: int = 90,
    seed: int = 0,
    width: int = 1280,
    height: int = 720,
    headless: bool = True,
    target_fps: float = 0.0,
    snapshot=None,
) -> MeshRunResult:
    """Display an OBJ as point cloud + wireframe with breathing deformation."""
    mesh = load_obj(obj_path)
    normals = compute_smooth_normals(mesh)
    rest = mesh.vertices.copy()

    instance = create_instance_with_config(EngineConfig(
        width=width, height=height, headless=headless, target_fps=target_fps, seed=seed,
    ))
    try:
        region, vert_alloc = alloc_linear(instance, 12 * mesh.vertex_count)
        device_vertices = region.view(np.float32).reshape(mesh.vertex_count, 3)
        device_vertices[:] = rest

        _, index_alloc = alloc_linear(instance, 4 * 3 * mesh.triangle_count)
        write_from_host(index_alloc, 0, np.ascontiguousarray(mesh.triangles.reshape(-1)))

        pos_format = make_format(NumericKind.FLOAT, 32, 3)
        create_view(instance, ViewDescription(
            view_type=ViewType.MARKERS,
            domain=Domain.DOMAIN_3D,
            element_count=mesh.vertex_count,
            default_size=2.0,
            default_color=(0.95, 0.8, 0.3, 1.0),
            properties={PropertyType.POSITION: PropertyDescription(
                source=vert_alloc, size=mesh.vertex_count, format=pos_format,
            )},
        ))
        create_view(instance, ViewDescription(
            view_type=ViewType.EDGES,
            domain=Domain.DOMAIN_3D,
            element_count=3 * mesh.triangle_count,
            default_color=(0.3, 0.6, 0.9, 1.0),
            properties={PropertyType.POSITION: PropertyDescription(
                source=vert_alloc, size=mesh.vertex_count, format=pos_format,
                indices=IndexDescription(
                    source=index_alloc, size=3 * mesh.triangle_count, index_size=4,
                ),
            )},
        ))

        display_async(instance)
        set_target_fps(instance, target_fps)
        degrees = 0.0
        for _ in range(iterations):
            scale, degrees = vary_angle(degrees, amplitude)
            prepare_views(instance)
            device_vertices[:] = breathe_deform(rest, normals, scale)
            update_views(instance)

        if snapshot:
            capture_frame(instance, snapshot)
        return MeshRunResult(
            vertices=device_vertices.copy(),
            counters=instance.sync.counters,
            degrees=degrees,
        )
    finally:
        destroy_instance(instance)
