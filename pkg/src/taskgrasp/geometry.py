"""Point clouds, part segments, nearest-distance queries and contact scoring."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, GeometryError, NoValidPartsError, PreconditionError

DEFAULT_CONTACT_THRESHOLD = 0.005  # meters
DEFAULT_MIN_PART_POINTS = 32

# rows of the query processed per block in the brute-force distance scan
_BLOCK = 1024


@dataclass(frozen=True)
class PointCloud:
    """N x 3 positions in meters."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1 and pts.size == 3:
            pts = pts.reshape(1, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise GeometryError(f"expected an (N, 3) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("point cloud contains non-finite coordinates")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def subset(self, indices) -> "PointCloud":
        return PointCloud(self.points[np.asarray(indices, dtype=np.int64)])

    def translated(self, offset) -> "PointCloud":
        return PointCloud(self.points + np.asarray(offset, dtype=np.float64))

    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)


def load_xyz(path: str | Path) -> PointCloud:
    """Read a plain-text ``x y z`` per line cloud; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GeometryError(f"{path}:{lineno}: expected 3 values, got {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise GeometryError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise GeometryError(f"{path}: no points")
    # PointCloud rejects nan/inf
    return PointCloud(np.array(rows))


def save_xyz(cloud: PointCloud, path: str | Path) -> None:
    with open(path, "w") as fh:
        for x, y, z in cloud.points.tolist():
            fh.write(f"{x!r} {y!r} {z!r}\n")


@dataclass
class PartSegment:
    label: str
    scale_level: int
    point_indices: np.ndarray
    valid: bool = True

    def __post_init__(self):
        idx = np.asarray(self.point_indices, dtype=np.int64).reshape(-1)
        if len(np.unique(idx)) != len(idx):
            raise GeometryError(f"segment {self.label!r} has duplicate indices")
        self.point_indices = idx

    def __len__(self) -> int:
        return len(self.point_indices)

    def check_indices(self, n_points: int) -> None:
        if len(self.point_indices) and (self.point_indices.min() < 0 or self.point_indices.max() >= n_points):
            raise GeometryError(f"segment {self.label!r} indexes outside a cloud of {n_points} points")

    def cloud(self, parent: PointCloud) -> PointCloud:
        self.check_indices(len(parent))
        return parent.subset(self.point_indices)


@dataclass
class GraspCandidate:
    part: PartSegment
    grasp: np.ndarray
    score: float


def min_distances(query: PointCloud, target: PointCloud) -> np.ndarray:
    """Distance from every query point to its nearest target point.

    This is an exhaustive scan (blocked to bound memory), so the result is
    exact rather than approximate.
    """
    q = query.points
    t = target.points
    if len(q) == 0 or len(t) == 0:
        raise PreconditionError("min_distances needs two non-empty clouds")
    out = np.empty(len(q))
    for start in range(0, len(q), _BLOCK):
        block = q[start:start + _BLOCK]
        diff = block[:, None, :] - t[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        out[start:start + _BLOCK] = np.sqrt(d2.min(axis=1))
    return out


def contact_score(part: PointCloud, hand: PointCloud, lam: float = DEFAULT_CONTACT_THRESHOLD) -> float:
    """Fraction of part points lying strictly closer than ``lam`` to the hand surface."""
    if not lam > 0:
        raise ConfigError(f"contact threshold must be positive, got {lam}")
    d = min_distances(part, hand)
    return float(np.count_nonzero(d < lam)) / len(d)


def filter_valid_parts(segments: Sequence[PartSegment], min_part_points: int = DEFAULT_MIN_PART_POINTS) -> list[PartSegment]:
    if min_part_points < 1:
        raise ConfigError(f"min_part_points must be >= 1, got {min_part_points}")
    kept = []
    for seg in segments:
        seg.valid = len(seg.point_indices) >= min_part_points
        if seg.valid:
            kept.append(seg)
    return kept


def select_best(candidates: Sequence[GraspCandidate]) -> GraspCandidate:
    """Highest score wins; the earliest candidate wins a tie."""
    if not candidates:
        raise NoValidPartsError("no candidates to select from")
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.score > best.score:
            best = cand
    return best
