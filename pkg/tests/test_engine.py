"""Instance lifecycle: creation, configuration, shutdown."""

import time

import numpy as np
import pytest

import gpuviz
from gpuviz import (
    EngineConfig,
    create_instance,
    create_instance_with_config,
    destroy_instance,
    display_async,
    is_running,
)
from gpuviz.errors import InvalidConfig, SurfaceCreationFailed

from conftest import make_marker_view


@pytest.fixture(autouse=True)
def _headless_env(monkeypatch):
    monkeypatch.setenv("VIZ_HEADLESS", "1")


def test_create_instance_fullhd():
    inst = create_instance(1920, 1080)
    try:
        assert inst.framebuffer.width == 1920
        assert inst.framebuffer.height == 1080
        assert is_running(inst)
    finally:
        destroy_instance(inst)


def test_create_instance_square():
    inst = create_instance(2000, 2000)
    try:
        assert is_running(inst)
        assert inst.framebuffer.color.shape == (2000, 2000, 3)
    finally:
        destroy_instance(inst)


def test_zero_extent_rejected():
    with pytest.raises(InvalidConfig):
        create_instance(0, 1080)


def test_config_target_fps():
    inst = create_instance_with_config(EngineConfig(1920, 1080, target_fps=144, headless=True))
    try:
        assert inst.sync.target_fps == 144
    finally:
        destroy_instance(inst)


def test_config_headless_offscreen():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True))
    try:
        assert inst.config.headless
        assert inst.framebuffer.color.shape == (64, 64, 3)
    finally:
        destroy_instance(inst)


def test_config_unlimited_fps_default():
    inst = create_instance_with_config(EngineConfig(1920, 1080, target_fps=0, headless=True))
    try:
        assert inst.sync.target_fps == 0
    finally:
        destroy_instance(inst)


def test_windowed_without_display_fails(monkeypatch):
    monkeypatch.delenv("VIZ_HEADLESS", raising=False)
    monkeypatch.delenv("DISPLAY", raising=False)
    monkeypatch.delenv("WAYLAND_DISPLAY", raising=False)
    with pytest.raises(SurfaceCreationFailed):
        create_instance_with_config(EngineConfig(320, 200, headless=False))


def test_is_running_transitions():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True))
    assert is_running(inst)
    inst.post_close_event()
    assert not is_running(inst)
    destroy_instance(inst)
    assert not is_running(inst)


def test_destroy_releases_everything():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True))
    make_marker_view(inst, n=8)
    make_marker_view(inst, n=8, seed=1)
    gpuviz.alloc_linear(inst, 64)
    assert inst.live_views == 2
    assert inst.live_allocations == 3
    destroy_instance(inst)
    assert inst.live_views == 0
    assert inst.live_allocations == 0
    assert inst.metrics.views_created == inst.metrics.views_destroyed
    assert inst.metrics.allocations_created == inst.metrics.allocations_freed


def test_destroy_twice_is_noop():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True))
    destroy_instance(inst)
    destroy_instance(inst)


def test_destroy_stops_render_loop_promptly():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True, target_fps=60))
    make_marker_view(inst, n=4)
    display_async(inst)
    deadline = time.monotonic() + 2.0
    while inst.sync.counters.frames_presented == 0 and time.monotonic() < deadline:
        time.sleep(0.005)
    assert inst.sync.counters.frames_presented > 0
    thread = inst.sync._thread
    start = time.monotonic()
    destroy_instance(inst)
    assert time.monotonic() - start < 1.0 / 60.0 + 0.25  # one frame period + margin
    assert thread is not None and not thread.is_alive()


def test_graphics_memory_accounting():
    inst = create_instance_with_config(EngineConfig(64, 64, headless=True))
    base = inst.graphics_memory_bytes()
    assert base == inst.framebuffer.byte_size
    region, alloc = gpuviz.alloc_linear(inst, 1024)
    assert inst.graphics_memory_bytes() == base + 1024
    destroy_instance(inst)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        EngineConfig(100, 100, target_fps=-1).validate()
    with pytest.raises(InvalidConfig):
        EngineConfig(100, 100, seed=-5).validate()
