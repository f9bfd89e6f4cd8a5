import numpy as np
import pytest

from gpuviz import (
    EngineConfig,
    NumericKind,
    PropertyType,
    ViewDescription,
    ViewType,
    Domain,
    alloc_linear,
    create_instance_with_config,
    create_view,
    destroy_instance,
    make_format,
)
from gpuviz.views import PropertyDescription


@pytest.fixture
def instance():
    inst = create_instance_with_config(EngineConfig(width=160, height=120, headless=True))
    yield inst
    destroy_instance(inst)


def make_marker_view(inst, n=16, seed=0, size=2.0, domain=Domain.DOMAIN_3D):
    """Small marker view over a fresh allocation; returns (view, alloc, region)."""
    rng = np.random.default_rng(seed)
    region, alloc = alloc_linear(inst, 12 * n)
    pts = region.view(np.float32).reshape(n, 3)
    pts[:] = rng.random((n, 3), dtype=np.float32)
    view = create_view(inst, ViewDescription(
        view_type=ViewType.MARKERS,
        domain=domain,
        element_count=n,
        default_size=size,
        properties={PropertyType.POSITION: PropertyDescription(
            source=alloc, size=n, format=make_format(NumericKind.FLOAT, 32, 3),
        )},
    ))
    return view, alloc, pts
