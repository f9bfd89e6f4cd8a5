"""Declarative view model.

A view binds shared allocations to a render pipeline through explicit
format descriptions; the library treats sources as raw memory and never
transforms their bytes. Validation happens at createView time, runtime
mutation (visibility, defaults) is frame-atomic via the sync layer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import (
    BadIndexWidth,
    ForeignAllocation,
    InvalidConfig,
    InvalidFormat,
    InvalidValue,
    MissingPosition,
    SizeMismatch,
)
from .memory import SharedAllocation, alloc_linear, read_to_host

if TYPE_CHECKING:
    from .engine import Instance


class NumericKind(Enum):
    SIGNED_INT = "int"
    UNSIGNED_INT = "uint"
    FLOAT = "float"


class ViewType(Enum):
    MARKERS = "markers"
    EDGES = "edges"
    VOXELS = "voxels"


class Domain(Enum):
    DOMAIN_2D = "2d"
    DOMAIN_3D = "3d"


class PropertyType(Enum):
    POSITION = "position"
    COLOR = "color"
    SIZE = "size"
    ROTATION = "rotation"


class MarkerShape(Enum):
    DISC = "disc"
    DIAMOND = "diamond"
    ARROW = "arrow"


class MarkerStyleKind(Enum):
    FILLED = "filled"
    STROKED = "stroked"
    OUTLINED = "outlined"


_DTYPES = {
    (NumericKind.SIGNED_INT, 8): np.int8,
    (NumericKind.SIGNED_INT, 16): np.int16,
    (NumericKind.SIGNED_INT, 32): np.int32,
    (NumericKind.SIGNED_INT, 64): np.int64,
    (NumericKind.UNSIGNED_INT, 8): np.uint8,
    (NumericKind.UNSIGNED_INT, 16): np.uint16,
    (NumericKind.UNSIGNED_INT, 32): np.uint32,
    (NumericKind.UNSIGNED_INT, 64): np.uint64,
    (NumericKind.FLOAT, 16): np.float16,
    (NumericKind.FLOAT, 32): np.float32,
    (NumericKind.FLOAT, 64): np.float64,
}


@dataclass(frozen=True)
class FormatDescription:
    """Element format of a property source: kind, bit width, component count."""

    kind: NumericKind
    bit_width: int
    components: int

    @property
    def bytes_per_element(self) -> int:
        return self.components * self.bit_width // 8

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(_DTYPES[(self.kind, self.bit_width)])


def make_format(kind: NumericKind, bit_width: int, components: int) -> FormatDescription:
    """Validated format constructor; rejects unrepresentable combinations."""
    if bit_width not in (8, 16, 32, 64):
        raise InvalidFormat(f"unsupported bit width {bit_width}")
    if not 1 <= components <= 4:
        raise InvalidFormat(f"component count {components} outside 1..4")
    if kind is NumericKind.FLOAT and bit_width == 8:
        raise InvalidFormat("8-bit floats do not exist")
    return FormatDescription(kind, bit_width, components)


@dataclass
class IndexDescription:
    """Integer indirection: property values are looked up through these indices."""

    source: SharedAllocation
    size: int
    index_size: int  # bytes per index: 1, 2 or 4

    @property
    def dtype(self) -> np.dtype:
        return np.dtype({1: np.uint8, 2: np.uint16, 4: np.uint32}[self.index_size])


@dataclass
class PropertyDescription:
    """One visual attribute's data source."""

    source: SharedAllocation
    size: int
    format: FormatDescription
    indices: Optional[IndexDescription] = None


@dataclass
class MarkerOptions:
    shape: MarkerShape = MarkerShape.DISC
    style: MarkerStyleKind = MarkerStyleKind.FILLED


@dataclass
class ViewDescription:
    view_type: ViewType
    domain: Domain
    element_count: int
    properties: dict[PropertyType, PropertyDescription] = field(default_factory=dict)
    extent: tuple[float, float, float] = (0.0, 0.0, 0.0)  # {0,0,0} = auto-fit from data
    visible: bool = True
    default_color: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    default_size: float = 1.0
    linewidth: float = 1.0
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)
    options: MarkerOptions = field(default_factory=MarkerOptions)


_view_ids = itertools.count(1)

# 4-component positions carry a scalar payload (e.g. mass) in w; only xyz renders.
_POSITION_FORMATS = {(NumericKind.FLOAT, 32, 2), (NumericKind.FLOAT, 32, 3),
                     (NumericKind.FLOAT, 64, 2), (NumericKind.FLOAT, 64, 3),
                     (NumericKind.FLOAT, 32, 4), (NumericKind.FLOAT, 64, 4)}
_COLOR_FORMATS = {(NumericKind.FLOAT, 32, 3), (NumericKind.FLOAT, 32, 4)}
_SCALAR_FORMATS = {(NumericKind.FLOAT, 32, 1)}


class ViewHandle:
    """Live view with mutable runtime state (visibility and defaults).

    Destroying the view releases only view-owned render resources; user
    allocations merely lose one reference.
    """

    def __init__(self, instance: "Instance", desc: ViewDescription):
        self.id = next(_view_ids)
        self.instance = instance
        self.desc = desc
        self.visible = desc.visible
        self.default_color = tuple(desc.default_color)
        self.default_size = float(desc.default_size)
        self.alive = True

    def toggle_visibility(self) -> None:
        """Negate visibility, frame-atomically.

        Inside a critical section the flip is queued and applied at the
        updateViews boundary together with every other change queued in
        the same section; outside, it applies at the next frame boundary.
        """
        self.instance.sync.apply_or_queue(lambda: self._flip())

    def _flip(self) -> None:
        self.visible = not self.visible

    def set_default_color(self, rgba) -> None:
        rgba = tuple(float(c) for c in rgba)
        if len(rgba) != 4 or any(not 0.0 <= c <= 1.0 for c in rgba):
            raise InvalidValue(f"rgba channels must lie in [0,1]: {rgba}")
        self.instance.sync.apply_or_queue(lambda: setattr(self, "default_color", rgba))

    def set_default_size(self, size: float) -> None:
        if not size > 0:
            raise InvalidValue("default size must be positive")
        self.instance.sync.apply_or_queue(lambda: setattr(self, "default_size", float(size)))

    def __repr__(self) -> str:
        return f"ViewHandle(id={self.id}, type={self.desc.view_type.value}, visible={self.visible})"


def _referenced_allocations(desc: ViewDescription) -> list[SharedAllocation]:
    allocs = []
    for prop in desc.properties.values():
        allocs.append(prop.source)
        if prop.indices is not None:
            allocs.append(prop.indices.source)
    return allocs


def _validate_property(name: str, prop: PropertyDescription, instance: "Instance") -> None:
    if not instance._owns_allocation(prop.source):
        raise ForeignAllocation(f"{name} source does not belong to this instance")
    needed = prop.size * prop.format.bytes_per_element
    if prop.source.byte_size < needed:
        raise SizeMismatch(
            f"{name} needs {needed} bytes ({prop.size} x {prop.format.bytes_per_element}) "
            f"but source holds {prop.source.byte_size}"
        )
    idx = prop.indices
    if idx is not None:
        if idx.index_size not in (1, 2, 4):
            raise BadIndexWidth(f"index size {idx.index_size} not in {{1, 2, 4}}")
        if not instance._owns_allocation(idx.source):
            raise ForeignAllocation(f"{name} index source does not belong to this instance")
        if idx.source.byte_size < idx.size * idx.index_size:
            raise SizeMismatch(
                f"{name} index buffer needs {idx.size * idx.index_size} bytes "
                f"but source holds {idx.source.byte_size}"
            )


def create_view(instance: "Instance", desc: ViewDescription) -> ViewHandle:
    """Validate a description and register the resulting view.

    The pipeline variant (view type, domain, marker shape/style, property
    presence) is resolved here; rendering picks it up on the next frame.
    """
    instance._check_live()
    if desc.element_count <= 0:
        raise InvalidConfig("element_count must be positive")
    if PropertyType.POSITION not in desc.properties:
        raise MissingPosition("a view must define at least the position property")

    pos = desc.properties[PropertyType.POSITION]
    key = (pos.format.kind, pos.format.bit_width, pos.format.components)
    if key not in _POSITION_FORMATS:
        raise InvalidFormat(f"position format {key} unsupported")
    for ptype, allowed in ((PropertyType.COLOR, _COLOR_FORMATS),
                           (PropertyType.SIZE, _SCALAR_FORMATS),
                           (PropertyType.ROTATION, _SCALAR_FORMATS)):
        prop = desc.properties.get(ptype)
        if prop is not None:
            k = (prop.format.kind, prop.format.bit_width, prop.format.components)
            if k not in allowed:
                raise InvalidFormat(f"{ptype.value} format {k} unsupported")

    for ptype, prop in desc.properties.items():
        _validate_property(ptype.value, prop, instance)

    if desc.view_type is ViewType.EDGES and pos.indices is None and desc.element_count % 2 != 0:
        raise InvalidConfig("edges without indices need an even endpoint count")

    view = ViewHandle(instance, desc)
    for alloc in _referenced_allocations(desc):
        alloc.ref_count += 1
    instance._register_view(view)
    return view


def destroy_view(instance: "Instance", view: ViewHandle) -> None:
    """Remove a view; it is absent from the next presented frame onward."""
    if not view.alive:
        return
    view.alive = False
    view.visible = False
    for alloc in _referenced_allocations(view.desc):
        alloc.ref_count -= 1
    instance._unregister_view(view)


def make_structured_grid(instance: "Instance", extent: tuple[int, int, int]) -> PropertyDescription:
    """Allocate and fill a regular lattice of positions.

    Output index p maps to (p mod nx, (p // nx) mod ny, p // (nx * ny)),
    i.e. i varies fastest, then j, then k.
    """
    nx, ny, nz = (int(v) for v in extent)
    if min(nx, ny, nz) < 1:
        raise InvalidConfig(f"grid extent must be >= 1 per axis, got {extent}")
    count = nx * ny * nz
    region, alloc = alloc_linear(instance, count * 12)
    grid = region.view(np.float32).reshape(count, 3)
    k, j, i = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    grid[:, 0] = i.reshape(-1)
    grid[:, 1] = j.reshape(-1)
    grid[:, 2] = k.reshape(-1)
    return PropertyDescription(source=alloc, size=count, format=make_format(NumericKind.FLOAT, 32, 3))


def pipeline_variant_key(desc: ViewDescription) -> str:
    """Canonical identity of the render pipeline a description resolves to.

    Descriptions with equal keys share one pipeline; the key covers view
    type, domain, marker shape/style and the bound property formats.
    """
    parts = [desc.view_type.value, desc.domain.value]
    if desc.view_type is ViewType.MARKERS:
        parts += [desc.options.shape.value, desc.options.style.value]
    tokens = []
    for ptype in sorted(desc.properties, key=lambda p: p.value):
        prop = desc.properties[ptype]
        fmt = prop.format
        token = f"{ptype.value}={fmt.kind.value}{fmt.bit_width}x{fmt.components}"
        if prop.indices is not None:
            token += f"@idx{prop.indices.index_size * 8}"
        tokens.append(token)
    return "/".join(parts) + "|" + ",".join(tokens)


def validate_indices(prop: PropertyDescription) -> bool:
    """True iff every index value addresses inside the property. Host-side check."""
    idx = prop.indices
    if idx is None:
        raise InvalidConfig("property has no index description")
    raw = read_to_host(idx.source, 0, idx.size * idx.index_size)
    values = np.frombuffer(raw, dtype=idx.dtype)
    return bool((values < prop.size).all())


def decode_property(prop: PropertyDescription) -> np.ndarray:
    """Zero-copy typed view of a property's source as (size, components)."""
    arr = prop.source.buffer.view(prop.format.dtype, prop.size * prop.format.components)
    return arr.reshape(prop.size, prop.format.components)


def decode_indices(idx: IndexDescription) -> np.ndarray:
    """Zero-copy typed view of an index buffer as a flat integer array."""
    return idx.source.buffer.view(idx.dtype, idx.size)
