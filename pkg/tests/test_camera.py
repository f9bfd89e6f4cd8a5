"""Orbit camera: input handling, clamping, transform invertibility."""

import math

import numpy as np
import pytest

from gpuviz import Camera, Drag, Key, Scroll, fit_camera, handle_input
from gpuviz.render import render_frame

from conftest import make_marker_view


def test_drag_then_reset_restores_fit(instance):
    make_marker_view(instance)
    render_frame(instance)   # establishes the auto-fit camera
    fit = instance._fit_camera
    handle_input(instance, Drag(dx=40, dy=-25))
    assert instance.camera.yaw != fit.yaw
    handle_input(instance, Key("r"))
    assert instance.camera.yaw == fit.yaw
    assert instance.camera.pitch == fit.pitch
    assert instance.camera.distance == fit.distance


def test_scroll_inverse_pair(instance):
    make_marker_view(instance)
    render_frame(instance)
    before = instance.camera.distance
    handle_input(instance, Scroll(dz=+1))
    assert instance.camera.distance != before
    handle_input(instance, Scroll(dz=-1))
    assert instance.camera.distance == pytest.approx(before, rel=1e-6)


def test_pitch_clamped_and_still_invertible():
    cam = Camera()
    cam.orbit(0, 10_000)   # push far past +pi/2
    assert cam.pitch < math.pi / 2
    pts = np.random.default_rng(0).uniform(-1, 1, (32, 3))
    clip = cam.world_to_clip(pts, 1.5)
    back = cam.clip_to_world(clip, 1.5)
    np.testing.assert_allclose(back, pts, atol=1e-8)


def test_roundtrip_world_clip_world():
    cam = Camera(target=(1, 2, 3), distance=5, yaw=0.7, pitch=-0.3)
    pts = np.random.default_rng(1).uniform(-2, 2, (64, 3))
    back = cam.clip_to_world(cam.world_to_clip(pts, 16 / 9), 16 / 9)
    np.testing.assert_allclose(back, pts, atol=1e-8)


def test_projection_depth_range():
    cam = Camera(distance=2.0, near=1.0, far=10.0)
    # points straight ahead of the eye at the near and far planes
    eye = cam.eye
    fwd = np.asarray(cam.target) - eye
    fwd = fwd / np.linalg.norm(fwd)
    near_pt = (eye + fwd * cam.near)[None, :]
    far_pt = (eye + fwd * cam.far)[None, :]
    for pt, expected in ((near_pt, 0.0), (far_pt, 1.0)):
        clip = cam.world_to_clip(pt, 1.0)
        ndc_z = clip[0, 2] / clip[0, 3]
        assert ndc_z == pytest.approx(expected, abs=1e-9)


def test_fit_camera_frames_box():
    cam = fit_camera(np.zeros(3), np.ones(3))
    assert cam.target == (0.5, 0.5, 0.5)
    corners = np.array([[0, 0, 0], [1, 1, 1], [1, 0, 1]], dtype=float)
    clip = cam.world_to_clip(corners, 1.0)
    ndc = clip[:, :3] / clip[:, 3:4]
    assert (np.abs(ndc[:, :2]) <= 1.0).all()
    assert ((ndc[:, 2] >= 0) & (ndc[:, 2] <= 1)).all()


def test_unknown_event_rejected(instance):
    with pytest.raises(TypeError):
        handle_input(instance, object())
