"""View model: formats, validation matrix, structured grid, runtime mutation."""

import numpy as np
import pytest

from gpuviz import (
    Domain,
    IndexDescription,
    NumericKind,
    PropertyType,
    ViewDescription,
    ViewType,
    alloc_linear,
    create_view,
    destroy_view,
    make_format,
    make_structured_grid,
    pipeline_variant_key,
    validate_indices,
    write_from_host,
)
from gpuviz.errors import (
    BadIndexWidth,
    ForeignAllocation,
    InvalidConfig,
    InvalidFormat,
    InvalidValue,
    MissingPosition,
    SizeMismatch,
)
from gpuviz.views import PropertyDescription, decode_property
from gpuviz.engine import EngineConfig, create_instance_with_config, destroy_instance


# -- formats ------------------------------------------------------------------

def test_format_float3_is_12_bytes():
    assert make_format(NumericKind.FLOAT, 32, 3).bytes_per_element == 12


def test_format_double2_is_16_bytes():
    assert make_format(NumericKind.FLOAT, 64, 2).bytes_per_element == 16


def test_format_float8_rejected():
    with pytest.raises(InvalidFormat):
        make_format(NumericKind.FLOAT, 8, 1)


def test_format_component_bounds():
    with pytest.raises(InvalidFormat):
        make_format(NumericKind.FLOAT, 32, 5)
    with pytest.raises(InvalidFormat):
        make_format(NumericKind.FLOAT, 32, 0)


# -- creation and the validation matrix ---------------------------------------

def _position_prop(instance, n):
    region, alloc = alloc_linear(instance, 12 * n)
    region.view(np.float32)[:] = 0.5
    return PropertyDescription(source=alloc, size=n,
                               format=make_format(NumericKind.FLOAT, 32, 3))


def test_markers_minimal_description(instance):
    n = 10
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    ))
    assert view.visible
    assert instance.live_views == 1


def test_missing_position_rejected(instance):
    with pytest.raises(MissingPosition):
        create_view(instance, ViewDescription(
            view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=4,
        ))


def test_size_mismatch_rejected_and_cured(instance):
    _, small = alloc_linear(instance, 8)   # too small for 4 x float3
    bad = PropertyDescription(source=small, size=4,
                              format=make_format(NumericKind.FLOAT, 32, 3))
    with pytest.raises(SizeMismatch):
        create_view(instance, ViewDescription(
            view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=4,
            properties={PropertyType.POSITION: bad},
        ))
    # minimal fix: a source that actually holds 4 elements
    create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=4,
        properties={PropertyType.POSITION: _position_prop(instance, 4)},
    ))


def test_bad_index_width_rejected_and_cured(instance):
    n = 4
    pos = _position_prop(instance, n)
    _, colors = alloc_linear(instance, 16 * 2)
    _, idx_alloc = alloc_linear(instance, 3 * n)
    color_fmt = make_format(NumericKind.FLOAT, 32, 4)

    def desc(index_size):
        return ViewDescription(
            view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
            properties={
                PropertyType.POSITION: pos,
                PropertyType.COLOR: PropertyDescription(
                    source=colors, size=2, format=color_fmt,
                    indices=IndexDescription(source=idx_alloc, size=n, index_size=index_size),
                ),
            },
        )

    with pytest.raises(BadIndexWidth):
        create_view(instance, desc(3))
    create_view(instance, desc(1))   # minimal fix: a legal width


def test_foreign_allocation_rejected_and_cured(instance):
    other = create_instance_with_config(EngineConfig(32, 32, headless=True))
    try:
        foreign = _position_prop(other, 4)
        with pytest.raises(ForeignAllocation):
            create_view(instance, ViewDescription(
                view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=4,
                properties={PropertyType.POSITION: foreign},
            ))
        create_view(instance, ViewDescription(
            view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=4,
            properties={PropertyType.POSITION: _position_prop(instance, 4)},
        ))
    finally:
        destroy_instance(other)


def test_voxel_lattice_view(instance):
    length = 4
    grid_pos = make_structured_grid(instance, (length, length, 1))
    lattice_region, lattice = alloc_linear(instance, 4 * length * length)
    lattice_region.view(np.int32)[:] = np.arange(length * length) % 9
    colors_region, colors = alloc_linear(instance, 9 * 16)
    colors_region.view(np.float32)[:] = 0.5
    view = create_view(instance, ViewDescription(
        view_type=ViewType.VOXELS, domain=Domain.DOMAIN_2D,
        element_count=length * length,
        properties={
            PropertyType.POSITION: grid_pos,
            PropertyType.COLOR: PropertyDescription(
                source=colors, size=9, format=make_format(NumericKind.FLOAT, 32, 4),
                indices=IndexDescription(source=lattice, size=length * length, index_size=4),
            ),
        },
    ))
    assert view.desc.view_type is ViewType.VOXELS


def test_edges_wireframe_view(instance):
    vertices = 4
    tris = 2
    pos_region, pos_alloc = alloc_linear(instance, 12 * vertices)
    pos_region.view(np.float32)[:] = 0.0
    idx_region, idx_alloc = alloc_linear(instance, 4 * 3 * tris)
    idx_region.view(np.uint32)[:] = [0, 1, 2, 0, 2, 3]
    view = create_view(instance, ViewDescription(
        view_type=ViewType.EDGES, domain=Domain.DOMAIN_3D, element_count=3 * tris,
        properties={PropertyType.POSITION: PropertyDescription(
            source=pos_alloc, size=vertices, format=make_format(NumericKind.FLOAT, 32, 3),
            indices=IndexDescription(source=idx_alloc, size=3 * tris, index_size=4),
        )},
    ))
    assert view.desc.element_count == 6


def test_edges_without_indices_need_even_count(instance):
    with pytest.raises(InvalidConfig):
        create_view(instance, ViewDescription(
            view_type=ViewType.EDGES, domain=Domain.DOMAIN_3D, element_count=3,
            properties={PropertyType.POSITION: _position_prop(instance, 3)},
        ))


# -- destruction ordering ------------------------------------------------------

def test_destroy_then_free_source(instance):
    from gpuviz import free_allocation

    n = 4
    prop = _position_prop(instance, n)
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: prop},
    ))
    destroy_view(instance, view)
    free_allocation(instance, prop.source)


def test_double_destroy_noop(instance):
    n = 4
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    ))
    destroy_view(instance, view)
    destroy_view(instance, view)
    assert instance.live_views == 0


# -- runtime mutation ----------------------------------------------------------

def test_toggle_visibility(instance):
    n = 4
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    ))
    assert view.visible
    view.toggle_visibility()
    assert not view.visible


def test_set_default_size_validation(instance):
    n = 4
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    ))
    with pytest.raises(InvalidValue):
        view.set_default_size(0)
    view.set_default_size(3.5)
    assert view.default_size == 3.5


def test_set_default_color_validation(instance):
    n = 4
    view = create_view(instance, ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    ))
    with pytest.raises(InvalidValue):
        view.set_default_color((2.0, 0, 0, 1))
    view.set_default_color((1, 0, 0, 1))
    assert view.default_color == (1.0, 0.0, 0.0, 1.0)


# -- structured grid oracle ----------------------------------------------------

def grid_oracle(nx, ny, nz):
    out = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                out.append((i, j, k))
    return np.array(out, dtype=np.float32)


@pytest.mark.parametrize("extent", [(1, 1, 1), (2, 2, 1), (5, 3, 2), (8, 8, 1)])
def test_structured_grid_matches_loop_oracle(instance, extent):
    prop = make_structured_grid(instance, extent)
    got = decode_property(prop)
    np.testing.assert_array_equal(got, grid_oracle(*extent))


def test_structured_grid_square_lattice_bounds(instance):
    length = 6
    got = decode_property(make_structured_grid(instance, (length, length, 1)))
    assert len(got) == length * length
    np.testing.assert_array_equal(got.max(axis=0), [length - 1, length - 1, 0])


def test_structured_grid_rejects_zero_axis(instance):
    with pytest.raises(InvalidConfig):
        make_structured_grid(instance, (0, 2, 1))


# -- index validation ----------------------------------------------------------

def _indexed_color_prop(instance, index_values):
    _, colors = alloc_linear(instance, 3 * 16)
    idx_region, idx_alloc = alloc_linear(instance, len(index_values))
    idx_region.view(np.uint8)[:] = index_values
    return PropertyDescription(
        source=colors, size=3, format=make_format(NumericKind.FLOAT, 32, 4),
        indices=IndexDescription(source=idx_alloc, size=len(index_values), index_size=1),
    )


def test_validate_indices_in_range(instance):
    assert validate_indices(_indexed_color_prop(instance, [0, 1, 2]))


def test_validate_indices_out_of_range(instance):
    assert not validate_indices(_indexed_color_prop(instance, [0, 1, 3]))


def test_validate_indices_reflects_current_contents(instance):
    prop = _indexed_color_prop(instance, [0, 1, 3])
    assert not validate_indices(prop)
    write_from_host(prop.indices.source, 0, bytes([0, 1, 2]))
    assert validate_indices(prop)


# -- pipeline identity ---------------------------------------------------------

def test_pipeline_variant_key_stable(instance):
    n = 4
    desc_a = ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=n,
        properties={PropertyType.POSITION: _position_prop(instance, n)},
    )
    desc_b = ViewDescription(
        view_type=ViewType.MARKERS, domain=Domain.DOMAIN_3D, element_count=2 * n,
        properties={PropertyType.POSITION: _position_prop(instance, 2 * n)},
    )
    assert pipeline_variant_key(desc_a) == pipeline_variant_key(desc_b)
    assert pipeline_variant_key(desc_a) == "markers/3d/disc/filled|position=float32x3"
