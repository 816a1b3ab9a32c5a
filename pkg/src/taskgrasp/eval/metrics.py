"""Grasp quality metrics: voxel penetration, contact ratio, diversity, Frechet feature distance."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from ..errors import GeometryError, InsufficientDataError, PreconditionError
from ..geometry import DEFAULT_CONTACT_THRESHOLD, PointCloud, contact_score, min_distances

DEFAULT_VOXEL = 0.005  # meters
M3_TO_CM3 = 1e6
M_TO_CM = 100.0
FRECHET_LABEL = "Frechet feature distance (non-comparable to published P-FID)"


@dataclass
class MetricReport:
    penetration_volume_cm3: float
    penetration_depth_cm: float
    contact_ratio: float
    diversity: float
    frechet_distance: float | None
    sample_count: int
    config: dict = field(default_factory=dict)
    frechet_label: str = FRECHET_LABEL

    def to_dict(self) -> dict:
        return asdict(self)


class VoxelGrid:
    """Axis-aligned grid of cubic cells with one empty cell of padding on every side."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, voxel: float):
        if not voxel > 0:
            raise GeometryError(f"voxel size must be positive, got {voxel}")
        self.voxel = voxel
        self.origin = np.asarray(lo, dtype=np.float64) - voxel
        self.shape = tuple(np.floor((np.asarray(hi) - self.origin) / voxel).astype(int) + 2)

    def cells(self, pts: np.ndarray) -> np.ndarray:
        idx = np.floor((pts - self.origin) / self.voxel).astype(np.int64)
        return np.clip(idx, 0, np.array(self.shape) - 1)

    def occupancy(self, cloud: PointCloud) -> np.ndarray:
        occ = np.zeros(self.shape, dtype=bool)
        idx = self.cells(cloud.points)
        occ[idx[:, 0], idx[:, 1], idx[:, 2]] = True
        return occ


def filled_occupancy(cloud: PointCloud, grid: VoxelGrid) -> np.ndarray:
    """Surface cells plus every cell not reachable from the grid border (6-connected flood fill)."""
    return ndimage.binary_fill_holes(grid.occupancy(cloud))


def _grid_for(*clouds: PointCloud, voxel: float) -> VoxelGrid:
    pts = np.vstack([c.points for c in clouds])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if np.any(hi - lo <= 0):
        raise GeometryError("degenerate bounding box: points do not span three dimensions")
    return VoxelGrid(lo, hi, voxel)


def penetration_volume(hand: PointCloud, obj: PointCloud, voxel: float = DEFAULT_VOXEL) -> float:
    """Volume (cm^3) of cells occupied by both filled hand and filled object."""
    if not voxel > 0:
        raise GeometryError(f"voxel size must be positive, got {voxel}")
    grid = _grid_for(hand, obj, voxel=voxel)
    both = filled_occupancy(hand, grid) & filled_occupancy(obj, grid)
    return float(both.sum()) * voxel ** 3 * M3_TO_CM3


def penetration_depth(hand: PointCloud, obj: PointCloud, voxel: float = DEFAULT_VOXEL) -> float:
    """Largest distance (cm) from a hand point inside the filled object to the object surface."""
    if len(hand) == 0 or len(obj) == 0:
        raise PreconditionError("clouds must be non-empty")
    pts = obj.points
    if np.any(pts.max(axis=0) - pts.min(axis=0) <= 0):
        return 0.0
    grid = VoxelGrid(pts.min(axis=0), pts.max(axis=0), voxel)
    filled = filled_occupancy(obj, grid)
    inside_box = np.all((hand.points >= grid.origin) &
                        (hand.points < grid.origin + np.array(grid.shape) * voxel), axis=1)
    cand = hand.points[inside_box]
    if len(cand) == 0:
        return 0.0
    idx = grid.cells(cand)
    inside = cand[filled[idx[:, 0], idx[:, 1], idx[:, 2]]]
    if len(inside) == 0:
        return 0.0
    return float(min_distances(PointCloud(inside), obj).max()) * M_TO_CM


def contact_ratio(results: Sequence, hand_model, lam: float = DEFAULT_CONTACT_THRESHOLD) -> float:
    """Share of results whose selected hand touches the object anywhere."""
    if not results:
        raise PreconditionError("no results")
    touching = 0
    for r in results:
        hand = hand_model.surface(r.selected.grasp)
        touching += contact_score(r.request.object_cloud, hand, lam) > 0
    return touching / len(results)


def diversity(grasps: Sequence) -> float:
    """Mean over coordinates of the per-coordinate sample variance (ddof=1)."""
    g = np.asarray(grasps, dtype=np.float64)
    if g.ndim != 2 or len(g) < 2:
        raise InsufficientDataError("diversity needs at least two grasps")
    return float(g.var(axis=0, ddof=1).mean())


def _sqrtm_psd(m: np.ndarray, name: str) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.T) / 2)
    scale = max(1.0, float(np.abs(w).max()))
    if w.min() < -1e-10 * scale:
        raise ArithmeticError(f"{name} is not positive semi-definite (min eigenvalue {w.min():.3g})")
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.T


def gaussian_stats(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f = np.asarray(features, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    if len(f) < 2:
        raise InsufficientDataError("need at least two feature vectors")
    mu = f.mean(axis=0)
    sigma = np.atleast_2d(np.cov(f, rowvar=False))
    if len(f) <= f.shape[1]:
        sigma = sigma + 1e-6 * np.eye(f.shape[1])
    return mu, sigma


def frechet_distance(mu_a, sigma_a, mu_b, sigma_b) -> float:
    """``|mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))`` via a symmetric square root.

    ``Tr((S_a S_b)^(1/2))`` is computed as ``Tr((R S_b R)^(1/2))`` with
    ``R = S_a^(1/2)``; the two share eigenvalues and the latter is symmetric.
    """
    sa = np.atleast_2d(sigma_a)
    sb = np.atleast_2d(sigma_b)
    root_a = _sqrtm_psd(sa, "sigma_a")
    cross = _sqrtm_psd(root_a @ sb @ root_a, "cross covariance")
    diff = np.asarray(mu_a, dtype=np.float64) - np.asarray(mu_b, dtype=np.float64)
    d = float(diff @ diff + np.trace(sa) + np.trace(sb) - 2.0 * np.trace(cross))
    return max(d, 0.0)


def frechet_feature_distance(set_a: Sequence, set_b: Sequence, feature_fn: Callable[[object], np.ndarray]) -> float:
    fa = np.stack([np.atleast_1d(np.asarray(feature_fn(x), dtype=np.float64)) for x in set_a])
    fb = np.stack([np.atleast_1d(np.asarray(feature_fn(x), dtype=np.float64)) for x in set_b])
    mu_a, s_a = gaussian_stats(fa)
    mu_b, s_b = gaussian_stats(fb)
    return frechet_distance(mu_a, s_a, mu_b, s_b)
