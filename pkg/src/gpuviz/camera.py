"""Orbit camera with invertible view/projection transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

_PITCH_EPS = 1e-3
_DRAG_GAIN = 0.005   # radians per pixel
_SCROLL_GAIN = 0.1   # exponential zoom rate per scroll unit


@dataclass
class Camera:
    target: tuple[float, float, float] = (0.0, 0.0, 0.0)
    distance: float = 3.0
    yaw: float = 0.0
    pitch: float = 0.0
    fov_y: float = math.radians(45.0)
    near: float = 0.05
    far: float = 500.0

    def __post_init__(self):
        self.pitch = self._clamp_pitch(self.pitch)

    @staticmethod
    def _clamp_pitch(pitch: float) -> float:
        limit = math.pi / 2 - _PITCH_EPS
        return max(-limit, min(limit, pitch))

    @property
    def eye(self) -> np.ndarray:
        cp = math.cos(self.pitch)
        direction = np.array(
            [cp * math.sin(self.yaw), math.sin(self.pitch), cp * math.cos(self.yaw)]
        )
        return np.asarray(self.target, dtype=np.float64) + direction * self.distance

    def view_matrix(self) -> np.ndarray:
        eye = self.eye
        fwd = np.asarray(self.target, dtype=np.float64) - eye
        fwd /= np.linalg.norm(fwd)
        up = np.array([0.0, 1.0, 0.0])
        if abs(np.dot(fwd, up)) > 1.0 - 1e-9:
            up = np.array([0.0, 0.0, 1.0])
        right = np.cross(fwd, up)
        right /= np.linalg.norm(right)
        true_up = np.cross(right, fwd)
        m = np.eye(4)
        m[0, :3] = right
        m[1, :3] = true_up
        m[2, :3] = -fwd
        m[:3, 3] = -m[:3, :3] @ eye
        return m

    def projection_matrix(self, aspect: float) -> np.ndarray:
        f = 1.0 / math.tan(self.fov_y / 2.0)
        n, fa = self.near, self.far
        m = np.zeros((4, 4))
        m[0, 0] = f / aspect
        m[1, 1] = f
        m[2, 2] = fa / (n - fa)      # depth 0 at near, 1 at far
        m[2, 3] = n * fa / (n - fa)
        m[3, 2] = -1.0
        return m

    def world_to_clip(self, points: np.ndarray, aspect: float) -> np.ndarray:
        """(N,3) world points to (N,4) clip coordinates."""
        m = self.projection_matrix(aspect) @ self.view_matrix()
        hom = np.empty((len(points), 4))
        hom[:, :3] = points
        hom[:, 3] = 1.0
        return hom @ m.T

    def clip_to_world(self, clip: np.ndarray, aspect: float) -> np.ndarray:
        """Inverse of world_to_clip for (N,4) clip coordinates."""
        m = np.linalg.inv(self.projection_matrix(aspect) @ self.view_matrix())
        world = clip @ m.T
        return world[:, :3] / world[:, 3:4]

    # -- interactive control ------------------------------------------------

    def orbit(self, dx: float, dy: float) -> None:
        self.yaw += _DRAG_GAIN * dx
        self.pitch = self._clamp_pitch(self.pitch + _DRAG_GAIN * dy)

    def zoom(self, dz: float) -> None:
        self.distance *= math.exp(-_SCROLL_GAIN * dz)


def fit_camera(lo: np.ndarray, hi: np.ndarray, fov_y: float = math.radians(45.0)) -> Camera:
    """Camera framing the axis-aligned box [lo, hi]."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    center = (lo + hi) / 2.0
    diag = float(np.linalg.norm(hi - lo))
    if diag <= 0:
        diag = 1.0
    distance = 0.75 * diag / math.tan(fov_y / 2.0)
    return Camera(
        target=tuple(center),
        distance=distance,
        fov_y=fov_y,
        near=max(1e-4, 0.01 * distance),
        far=100.0 * max(distance, 1.0),
    )
