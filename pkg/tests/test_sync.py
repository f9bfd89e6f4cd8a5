"""Synchronization contract: critical sections, render loop, pacing."""

import threading
import time

import numpy as np
import pytest

from gpuviz import (
    EngineConfig,
    create_instance_with_config,
    destroy_instance,
    display,
    display_async,
    prepare_views,
    read_to_host,
    set_sync_enabled,
    set_target_fps,
    update_views,
    write_from_host,
)
from gpuviz.errors import (
    AlreadyDisplaying,
    InCriticalSection,
    NestedCriticalSection,
    NoOpenCriticalSection,
    NotDisplaying,
)

from conftest import make_marker_view


def test_display_zero_iterations(instance):
    make_marker_view(instance)
    display(instance, 0, lambda i: pytest.fail("compute_step must not run"))
    assert instance.sync.counters.critical_sections_completed == 0


def test_display_counts_iterations(instance):
    make_marker_view(instance)
    seen = []
    display(instance, 100, seen.append)
    assert seen == list(range(100))
    assert instance.sync.counters.critical_sections_completed == 100


def test_display_sync_no_overlap(instance):
    make_marker_view(instance)
    display(instance, 100, lambda i: None)
    assert instance.sync.counters.frames_started_during_critical == 0


def test_display_async_idle_frames(instance):
    make_marker_view(instance)
    display_async(instance)
    deadline = time.monotonic() + 2.0
    while instance.sync.counters.frames_presented < 3 and time.monotonic() < deadline:
        time.sleep(0.01)
    assert instance.sync.counters.frames_presented >= 3
    assert instance.sync.counters.critical_sections_completed == 0


def test_display_async_twice_fails(instance):
    display_async(instance)
    with pytest.raises(AlreadyDisplaying):
        display_async(instance)


def test_explicit_sections_require_display(instance):
    with pytest.raises(NotDisplaying):
        prepare_views(instance)


def test_nested_prepare_fails(instance):
    display_async(instance)
    prepare_views(instance)
    with pytest.raises(NestedCriticalSection):
        prepare_views(instance)
    update_views(instance)


def test_update_without_prepare_fails(instance):
    display_async(instance)
    with pytest.raises(NoOpenCriticalSection):
        update_views(instance)


def test_section_writes_visible_after_update(instance):
    view, alloc, pts = make_marker_view(instance, n=4)
    display_async(instance)
    prepare_views(instance)
    write_from_host(alloc, 0, np.full(12, 0.25, dtype=np.float32))
    update_views(instance)
    got = np.frombuffer(read_to_host(alloc, 0, 48), dtype=np.float32)
    np.testing.assert_array_equal(got[:12], 0.25)


def test_ping_pong_toggle_atomicity(instance):
    """Alternating ping-pong loop: each frame shows exactly one of the pair."""
    view_a, _, _ = make_marker_view(instance, n=8, seed=0)
    view_b, _, _ = make_marker_view(instance, n=8, seed=1)
    view_b.toggle_visibility()          # start with only A visible
    display_async(instance)
    for _ in range(50):
        prepare_views(instance)
        view_a.toggle_visibility()
        view_b.toggle_visibility()
        update_views(instance)
    time.sleep(0.05)
    frames = list(instance.metrics.frames)
    assert frames
    ids = {view_a.id, view_b.id}
    for stats in frames:
        shown = ids & set(stats.visible_views)
        assert len(shown) == 1, f"frame {stats.frame_index} shows {stats.visible_views}"


def test_toggle_outside_section_is_frame_atomic(instance):
    view, _, _ = make_marker_view(instance)
    display_async(instance)
    before = instance.sync.counters.frames_presented
    view.toggle_visibility()
    assert not view.visible   # applied immediately at a frame boundary
    deadline = time.monotonic() + 2.0
    while time.monotonic() < deadline:
        frames = [f for f in instance.metrics.frames if f.frame_index > before + 1]
        if frames:
            break
        time.sleep(0.01)
    assert frames and all(view.id not in f.visible_views for f in frames)


def test_prepare_waits_for_inflight_buffer_read(instance):
    """prepareViews returns only after the current frame's read span ends."""
    import gpuviz.sync as sync_mod

    view, _, _ = make_marker_view(instance)
    sync = instance.sync
    read_entered = threading.Event()
    release_read = threading.Event()

    original = sync.frame_read_span

    def slow_span():
        class _Span:
            def __enter__(self_inner):
                self_inner.ctx = original()
                result = self_inner.ctx.__enter__()
                read_entered.set()
                release_read.wait(timeout=5.0)
                return result

            def __exit__(self_inner, *exc):
                return self_inner.ctx.__exit__(*exc)

        return _Span()

    sync.frame_read_span = slow_span
    display_async(instance)
    assert read_entered.wait(timeout=2.0)

    t0 = time.perf_counter()
    timer = threading.Timer(0.3, release_read.set)
    timer.start()
    prepare_views(instance)
    waited = time.perf_counter() - t0
    update_views(instance)
    timer.cancel()
    release_read.set()
    sync.frame_read_span = original
    assert waited >= 0.25


def test_desync_prepare_returns_immediately(instance):
    make_marker_view(instance)
    display_async(instance)
    set_sync_enabled(instance, False)
    t0 = time.perf_counter()
    for _ in range(20):
        prepare_views(instance)
        update_views(instance)
    assert time.perf_counter() - t0 < 1.0


def test_desync_counts_overlapping_frames(instance):
    make_marker_view(instance, n=500, size=3.0)
    display_async(instance)
    set_sync_enabled(instance, False)
    deadline = time.monotonic() + 5.0
    while (instance.sync.counters.frames_started_during_critical == 0
           and time.monotonic() < deadline):
        prepare_views(instance)
        time.sleep(0.02)   # long enough for a frame to start mid-section
        update_views(instance)
    assert instance.sync.counters.frames_started_during_critical > 0


def test_sync_enabled_counter_stays_zero(instance):
    make_marker_view(instance, n=200, size=3.0)
    display_async(instance)
    for _ in range(50):
        prepare_views(instance)
        update_views(instance)
    assert instance.sync.counters.frames_started_during_critical == 0


def test_set_sync_mid_section_fails(instance):
    display_async(instance)
    prepare_views(instance)
    with pytest.raises(InCriticalSection):
        set_sync_enabled(instance, False)
    update_views(instance)


def test_target_fps_pacing_coarse(instance):
    """Quick pacing check; the long-window accuracy run lives in acceptance."""
    display_async(instance)
    set_target_fps(instance, 60)
    time.sleep(0.2)
    start = instance.sync.counters.frames_presented
    t0 = time.perf_counter()
    time.sleep(1.0)
    fps = (instance.sync.counters.frames_presented - start) / (time.perf_counter() - t0)
    assert 40 < fps < 80


def test_target_zero_runs_unpaced(instance):
    display_async(instance)
    time.sleep(0.3)
    assert instance.sync.counters.frames_presented > 30  # empty scene, no sleep
