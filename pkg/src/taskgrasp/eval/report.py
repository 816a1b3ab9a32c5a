"""Loading result files and assembling a MetricReport from them."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from types import SimpleNamespace
from typing import Callable, Sequence

import numpy as np

from ..errors import PreconditionError
from ..geometry import DEFAULT_CONTACT_THRESHOLD, PointCloud, load_xyz
from .metrics import (DEFAULT_VOXEL, MetricReport, contact_ratio, diversity, frechet_feature_distance,
                      penetration_depth, penetration_volume)


@dataclass
class EvalSample:
    object_cloud: PointCloud
    grasp: np.ndarray
    part_label: str = ""


def load_result_samples(results_dir: str | Path) -> list[EvalSample]:
    """One sample per result JSON (sorted by name); each must name its object file in ``request.object``."""
    root = Path(results_dir)
    samples = []
    clouds: dict[Path, PointCloud] = {}
    for path in sorted(root.glob("*.json")):
        doc = json.loads(path.read_text())
        obj = doc.get("request", {}).get("object")
        if obj is None:
            raise PreconditionError(f"{path.name}: request.object is missing; cannot locate the object cloud")
        obj_path = Path(obj) if Path(obj).is_absolute() else (root / obj)
        if not obj_path.exists():
            obj_path = Path(obj)
        if obj_path not in clouds:
            clouds[obj_path] = load_xyz(obj_path)
        sel = doc["selected"]
        samples.append(EvalSample(clouds[obj_path], np.asarray(sel["grasp"], dtype=np.float64), sel["part_label"]))
    if not samples:
        raise PreconditionError(f"no result files in {root}")
    return samples


def build_report(samples: Sequence[EvalSample], hand_model, lam: float = DEFAULT_CONTACT_THRESHOLD,
                 voxel: float = DEFAULT_VOXEL, reference: Sequence[np.ndarray] | None = None,
                 feature_fn: Callable[[np.ndarray], np.ndarray] | None = None,
                 workers: int = 1) -> MetricReport:
    """Average the per-sample penetration metrics and add the set-level ones.

    The Frechet field is filled only when both ``reference`` grasps and a
    ``feature_fn`` (grasp -> feature vector) are given.
    """
    if not samples:
        raise PreconditionError("no samples")

    def per_sample(s: EvalSample) -> tuple[float, float]:
        hand = hand_model.surface(s.grasp)
        return penetration_volume(hand, s.object_cloud, voxel), penetration_depth(hand, s.object_cloud, voxel)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            pen = list(pool.map(per_sample, samples))
    else:
        pen = [per_sample(s) for s in samples]
    adapters = [SimpleNamespace(selected=SimpleNamespace(grasp=s.grasp),
                                request=SimpleNamespace(object_cloud=s.object_cloud)) for s in samples]
    grasps = np.stack([s.grasp for s in samples])
    fd = None
    if reference is not None and feature_fn is not None:
        fd = frechet_feature_distance(list(grasps), list(reference), feature_fn)
    return MetricReport(
        penetration_volume_cm3=float(np.mean([p[0] for p in pen])),
        penetration_depth_cm=float(np.mean([p[1] for p in pen])),
        contact_ratio=contact_ratio(adapters, hand_model, lam),
        diversity=diversity(grasps),
        frechet_distance=fd,
        sample_count=len(samples),
        config={"contact_threshold": lam, "voxel": voxel, "reference_count": 0 if reference is None else len(reference)},
    )


def write_report_csv(report: MetricReport, path: str | Path) -> None:
    row = report.to_dict()
    row.pop("config")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(row))
        writer.writeheader()
        writer.writerow(row)
