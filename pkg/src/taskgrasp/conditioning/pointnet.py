"""Hierarchical set-abstraction point-cloud encoder.

Each level samples centers by farthest point sampling, groups the k nearest
neighbours of each center, lifts every group member with a shared MLP on
``[offset-from-center, previous features]`` and max-reduces per group. A final
max over the last level's centers yields the global feature.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import torch
from torch import nn

from ..errors import ConfigError, PreconditionError, ShapeError
from ..geometry import PointCloud


@dataclass
class SetAbstractionConfig:
    num_layers: int = 4
    sampled_points: list[int] = field(default_factory=lambda: [1024, 256, 64, 16])
    embedding_sizes: list[int] = field(default_factory=lambda: [64, 128, 256, 512])
    group_size: int = 32

    def __post_init__(self):
        if len(self.sampled_points) != self.num_layers or len(self.embedding_sizes) != self.num_layers:
            raise ConfigError("sampled_points and embedding_sizes need num_layers entries")
        if any(b >= a for a, b in zip(self.sampled_points, self.sampled_points[1:])):
            raise ConfigError(f"sampled_points must be strictly decreasing: {self.sampled_points}")
        if self.group_size < 1 or min(self.sampled_points) < 1:
            raise ConfigError("group_size and sampled_points must be positive")

    @property
    def out_dim(self) -> int:
        return self.embedding_sizes[-1]

    def to_dict(self) -> dict:
        return asdict(self)


def farthest_point_sample(points: np.ndarray | PointCloud, m: int, seed_index: int = 0) -> np.ndarray:
    """Greedy farthest point sampling; ties go to the lowest index."""
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    n = len(pts)
    if not 1 <= m <= n:
        raise PreconditionError(f"cannot sample {m} of {n} points")
    if not 0 <= seed_index < n:
        raise PreconditionError(f"seed index {seed_index} out of range")
    chosen = np.empty(m, dtype=np.int64)
    chosen[0] = seed_index
    dist = np.full(n, np.inf)
    for i in range(1, m):
        delta = pts - pts[chosen[i - 1]]
        dist = np.minimum(dist, np.einsum("ij,ij->i", delta, delta))
        dist[chosen[i - 1]] = -1.0  # never re-pick, even among duplicates
        chosen[i] = int(np.argmax(dist))
    return chosen


def knn_indices(centers: np.ndarray, points: np.ndarray, k: int) -> np.ndarray:
    delta = centers[:, None, :] - points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", delta, delta)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, : min(k, len(points))]


def canonicalize(points: np.ndarray) -> np.ndarray:
    """Sort points lexicographically, center them and scale to unit max radius.

    Sorting first makes everything downstream independent of input order.
    """
    pts = points[np.lexsort(points.T[::-1])]
    pts = pts - pts.mean(axis=0)
    radius = np.sqrt(np.einsum("ij,ij->i", pts, pts).max())
    if radius > 0:
        pts = pts / radius
    return pts


class SetAbstractionEncoder(nn.Module):
    def __init__(self, cfg: SetAbstractionConfig | None = None):
        super().__init__()
        self.cfg = cfg or SetAbstractionConfig()
        layers = []
        c_in = 0
        for emb in self.cfg.embedding_sizes:
            layers.append(nn.Sequential(nn.Linear(c_in + 3, emb), nn.ReLU(), nn.Linear(emb, emb), nn.ReLU()))
            c_in = emb
        self.levels = nn.ModuleList(layers)

    @property
    def out_dim(self) -> int:
        return self.cfg.out_dim

    def plan(self, points: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per level: (center indices into the previous level, neighbour indices)."""
        out = []
        xyz = points
        for m in self.cfg.sampled_points:
            centers = farthest_point_sample(xyz, m, 0)
            groups = knn_indices(xyz[centers], xyz, self.cfg.group_size)
            out.append((centers, groups))
            xyz = xyz[centers]
        return out

    def forward(self, points: np.ndarray) -> torch.Tensor:
        """``points`` must already be canonicalized and hold >= sampled_points[0] rows."""
        dtype = next(self.parameters()).dtype
        xyz = torch.as_tensor(points, dtype=dtype)
        feats = None
        for (centers, groups), mlp in zip(self.plan(points), self.levels):
            c = torch.as_tensor(centers)
            g = torch.as_tensor(groups)
            local = xyz[g] - xyz[c][:, None, :]
            if feats is not None:
                local = torch.cat([local, feats[g]], dim=-1)
            feats = mlp(local).amax(dim=1)
            xyz = xyz[c]
        return feats.amax(dim=0)


def prepare_points(pc: PointCloud, cfg: SetAbstractionConfig) -> np.ndarray:
    """Canonicalize and upsample by repetition to at least ``sampled_points[0]`` rows."""
    if len(pc) == 0:
        raise PreconditionError("cannot encode an empty cloud")
    pts = canonicalize(pc.points)
    need = cfg.sampled_points[0]
    if len(pts) < need:
        pts = pts[np.resize(np.arange(len(pts)), need)]
    return pts


def encode_pointcloud(pc: PointCloud, cfg: SetAbstractionConfig, weights: SetAbstractionEncoder) -> np.ndarray:
    if weights.cfg.embedding_sizes != cfg.embedding_sizes or weights.cfg.sampled_points != cfg.sampled_points:
        raise ShapeError("encoder weights were built for a different configuration")
    with torch.no_grad():
        return weights(prepare_points(pc, cfg)).cpu().numpy().astype(np.float64)
