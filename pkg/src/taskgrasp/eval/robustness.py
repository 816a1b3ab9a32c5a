"""Boundary-label corruption of part segmentations and a selection-accuracy curve over it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConfigError
from ..geometry import DEFAULT_CONTACT_THRESHOLD, PartSegment, PointCloud, filter_valid_parts

NEIGHBOURS = 8


def _owners(n_points: int, segments: Sequence[PartSegment]) -> np.ndarray:
    owner = np.full(n_points, -1, dtype=np.int64)
    for k, seg in enumerate(segments):
        free = seg.point_indices[owner[seg.point_indices] < 0]
        owner[free] = k
    return owner


def boundary_points(cloud: PointCloud, segments: Sequence[PartSegment]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Labelled points whose nearest labelled neighbour has a different owner.

    Returns (point indices, owner per cloud point, k-nearest labelled neighbours of each boundary point).
    """
    owner = _owners(len(cloud), segments)
    labelled = np.flatnonzero(owner >= 0)
    if len(labelled) < 2:
        return np.empty(0, dtype=np.int64), owner, np.empty((0, 0), dtype=np.int64)
    tree = cKDTree(cloud.points[labelled])
    k = min(NEIGHBOURS + 1, len(labelled))
    _, nn = tree.query(cloud.points[labelled], k=k)
    nn = labelled[nn[:, 1:]]  # drop self
    is_boundary = owner[nn[:, 0]] != owner[labelled]
    return labelled[is_boundary], owner, nn[is_boundary]


def corrupt_segments(cloud: PointCloud, segments: Sequence[PartSegment], level: float, seed: int = 0) -> list[PartSegment]:
    """Move ``round(level * |boundary|)`` boundary points to a random neighbouring segment."""
    if not 0.0 <= level <= 1.0:
        raise ConfigError(f"corruption level must be in [0, 1], got {level}")
    segments = list(segments)
    if level == 0.0:
        return [PartSegment(s.label, s.scale_level, s.point_indices.copy(), s.valid) for s in segments]
    rng = np.random.default_rng(seed)
    boundary, owner, nn = boundary_points(cloud, segments)
    n_move = int(round(level * len(boundary)))
    pick = rng.choice(len(boundary), size=n_move, replace=False) if n_move else np.empty(0, dtype=np.int64)
    new_owner = owner.copy()
    for j in np.sort(pick):
        p = boundary[j]
        options = np.unique(owner[nn[j]])
        options = options[(options >= 0) & (options != owner[p])]
        new_owner[p] = rng.choice(options)
    out = []
    for k, seg in enumerate(segments):
        # points claimed by several segments keep their extra memberships
        extra = seg.point_indices[owner[seg.point_indices] != k]
        members = np.union1d(np.flatnonzero(new_owner == k), extra)
        out.append(PartSegment(seg.label, seg.scale_level, members, seg.valid))
    return out


@dataclass
class RobustnessPoint:
    level: float
    accuracy: float
    trials: int


def selection_robustness_curve(objects: Sequence, hand_model, levels: Sequence[float] = (0.0, 0.25, 0.5),
                               seed: int = 0, lam: float = DEFAULT_CONTACT_THRESHOLD,
                               min_part_points: int = 1) -> list[RobustnessPoint]:
    """Part-selection accuracy of ground-truth grasps against corrupted segmentations.

    For every dataset grasp the part with the highest contact score under the
    corrupted segmentation is selected; it is correct when it matches the
    grasp's intended part.
    """
    from ..pipeline.pairs import assign_part

    curve = []
    for level in levels:
        correct = trials = 0
        for i, obj in enumerate(objects):
            segs = corrupt_segments(obj.cloud, obj.segments, level, seed=seed + i)
            valid = filter_valid_parts(segs, min_part_points)
            for g, intended, _task in obj.grasps:
                best = assign_part(g, obj.cloud, valid, hand_model, lam)
                trials += 1
                correct += best is not None and best.part.label == intended
        curve.append(RobustnessPoint(level, correct / trials if trials else float("nan"), trials))
    return curve
