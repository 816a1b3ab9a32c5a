"""Hand-surface models mapping 61 grasp parameters to a point cloud.

Parameter layout: ``[0:3]`` global axis-angle rotation, ``[3:48]`` joint
rotations, ``[48:58]`` shape, ``[58:61]`` palm translation in meters.
"""
from __future__ import annotations

from typing import Protocol

import numpy as np
from scipy.spatial.transform import Rotation

from ..diffusion.process import check_grasp
from ..geometry import PointCloud

HAND_POINTS = 778  # vertex count of the MANO hand mesh
GLOBAL_ROT = slice(0, 3)
JOINTS = slice(3, 48)
SHAPE = slice(48, 58)
TRANSLATION = slice(58, 61)


class HandModel(Protocol):
    num_points: int

    def surface(self, g: np.ndarray) -> PointCloud: ...


def fibonacci_sphere(n: int, radius: float) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * i
    return radius * np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


class StubHandModel:
    """A fixed 778-point template deformed by a seeded linear basis, then posed rigidly.

    The template is a sphere shell of ``radius`` meters centred at the origin.
    Joint and shape parameters displace template points through a fixed
    random basis (``basis_scale`` meters per unit parameter); the global
    rotation and translation then place the result. With ``anchor`` set, the
    translation is taken relative to it, and ``max_reach`` bounds the
    per-axis offset smoothly via ``max_reach * tanh(x / max_reach)``.
    """

    def __init__(self, radius: float = 0.04, num_points: int = HAND_POINTS, basis_scale: float = 0.002,
                 seed: int = 0, anchor=None, max_reach: float | None = None):
        self.num_points = num_points
        self.radius = radius
        self.template = fibonacci_sphere(num_points, radius)
        self.template.setflags(write=False)
        rng = np.random.default_rng(seed)
        n_def = (JOINTS.stop - JOINTS.start) + (SHAPE.stop - SHAPE.start)
        self.basis = basis_scale * rng.standard_normal((n_def, num_points, 3)) / np.sqrt(n_def)
        self.anchor = np.zeros(3) if anchor is None else np.asarray(anchor, dtype=np.float64)
        self.max_reach = max_reach

    def surface(self, g) -> PointCloud:
        g = check_grasp(g)
        coeffs = np.concatenate([g[JOINTS], g[SHAPE]])
        pts = self.template + np.tensordot(coeffs, self.basis, axes=1)
        rotvec = g[GLOBAL_ROT]
        if np.any(rotvec):
            pts = Rotation.from_rotvec(rotvec).apply(pts)
        offset = g[TRANSLATION]
        if self.max_reach is not None:
            offset = self.max_reach * np.tanh(offset / self.max_reach)
        if np.any(offset) or np.any(self.anchor):
            pts = pts + (self.anchor + offset)
        return PointCloud(pts)


def stub_hand_surface(g, model: StubHandModel | None = None) -> PointCloud:
    return (model or StubHandModel()).surface(g)
