"""Offline part segmenters and the segment file format."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np
from scipy.cluster.vq import kmeans2

from ..errors import GeometryError, PreconditionError
from ..geometry import PartSegment, PointCloud


class Segmenter(Protocol):
    def segment(self, cloud: PointCloud, part_labels: Sequence[tuple[str, int]]) -> list[PartSegment]: ...


def segment_to_dict(seg: PartSegment) -> dict:
    return {"label": seg.label, "scale_level": int(seg.scale_level), "indices": [int(i) for i in seg.point_indices]}


def segment_from_dict(d: dict) -> PartSegment:
    return PartSegment(d["label"], int(d["scale_level"]), np.asarray(d["indices"], dtype=np.int64))


def write_segment(seg: PartSegment, path: str | Path) -> None:
    Path(path).write_text(json.dumps(segment_to_dict(seg)))


def read_segments(directory: str | Path) -> list[PartSegment]:
    return [segment_from_dict(json.loads(p.read_text())) for p in sorted(Path(directory).glob("*.json"))]


class KMeansSegmenter:
    """Seeded k-means on coordinates, one region per label.

    Labels are sorted by name and regions by centroid (x, then y, then z);
    the i-th label gets the i-th region.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def segment(self, cloud: PointCloud, part_labels: Sequence[tuple[str, int]]) -> list[PartSegment]:
        if not part_labels:
            raise PreconditionError("need at least one part label")
        labels = sorted(part_labels)
        k = len(labels)
        if k > len(cloud):
            raise GeometryError(f"{k} labels but only {len(cloud)} points")
        if k == 1:
            return [PartSegment(labels[0][0], labels[0][1], np.arange(len(cloud)))]
        centroids, assign = kmeans2(cloud.points, k, minit="++", seed=np.random.default_rng(self.seed))
        order = np.lexsort(centroids.T[::-1])
        return [PartSegment(label, level, np.flatnonzero(assign == region))
                for (label, level), region in zip(labels, order)]


class GroundTruthSegmenter:
    """Serves segments from a directory of segment JSON files; unknown labels come back empty."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.segments = {s.label: s for s in read_segments(self.directory)}

    def segment(self, cloud: PointCloud, part_labels: Sequence[tuple[str, int]]) -> list[PartSegment]:
        out = []
        for label, level in part_labels:
            seg = self.segments.get(label)
            if seg is None:
                out.append(PartSegment(label, level, np.empty(0, dtype=np.int64)))
            else:
                seg.check_indices(len(cloud))
                out.append(PartSegment(seg.label, seg.scale_level, seg.point_indices.copy()))
        return out


def stub_segment(cloud: PointCloud, part_labels: Sequence[tuple[str, int]], gt_dir: str | Path | None = None,
                 seed: int = 0) -> list[PartSegment]:
    if gt_dir is not None and Path(gt_dir).is_dir() and any(Path(gt_dir).glob("*.json")):
        return GroundTruthSegmenter(gt_dir).segment(cloud, part_labels)
    return KMeansSegmenter(seed).segment(cloud, part_labels)
