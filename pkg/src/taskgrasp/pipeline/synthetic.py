"""Seeded synthetic objects made of stacked primitives, with contact-verified grasps.

Each object is a vertical stack of parts (cylinders, spheres, boxes cycling
in that order) that touch at their junctions. A grasp is built by placing
the stub hand just inside the side surface of its intended part; it is kept
only if that part is the contact-score argmax over all parts.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..diffusion.denoisers import GRASP_DIM
from ..errors import GenerationError
from ..geometry import (DEFAULT_CONTACT_THRESHOLD, DEFAULT_MIN_PART_POINTS, PartSegment, PointCloud,
                        contact_score, load_xyz, save_xyz)
from .hand import GLOBAL_ROT, JOINTS, SHAPE, TRANSLATION, StubHandModel, fibonacci_sphere
from .segment import read_segments, write_segment

log = logging.getLogger(__name__)

SHAPES = ("cylinder", "sphere", "box")
MAX_TRIES = 200


@dataclass
class SyntheticObject:
    category: str
    object_id: str
    cloud: PointCloud
    segments: list[PartSegment]
    # (grasp vector, intended part label, task)
    grasps: list[tuple[np.ndarray, str, str]] = field(default_factory=list)
    path: Path | None = None


def _cylinder(rng, n, r, z0, h):
    side = int(round(n * h / (h + r)))
    cap = (n - side) // 2
    th = rng.uniform(0, 2 * np.pi, side)
    pts = [np.column_stack([r * np.cos(th), r * np.sin(th), z0 + rng.uniform(0, h, side)])]
    for z in (z0, z0 + h):
        m = cap if z == z0 else n - side - cap
        rho = r * np.sqrt(rng.uniform(0, 1, m))
        ph = rng.uniform(0, 2 * np.pi, m)
        pts.append(np.column_stack([rho * np.cos(ph), rho * np.sin(ph), np.full(m, z)]))
    return np.vstack(pts)


def _sphere(rng, n, r, z0):
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return r * v + np.array([0.0, 0.0, z0 + r])


def _box(rng, n, a, z0, h):
    # a x a footprint, h tall; faces sampled in proportion to area
    areas = np.array([a * a, a * a] + [a * h] * 4)
    counts = rng.multinomial(n, areas / areas.sum())
    faces = []
    for face, m in enumerate(counts):
        u, w = rng.uniform(-a / 2, a / 2, m), rng.uniform(0, 1, m)
        if face < 2:
            faces.append(np.column_stack([u, rng.uniform(-a / 2, a / 2, m), np.full(m, z0 + (h if face else 0))]))
        else:
            z = z0 + w * h
            s = a / 2 if face % 2 else -a / 2
            faces.append(np.column_stack([np.full(m, s), u, z]) if face < 4 else np.column_stack([u, np.full(m, s), z]))
    return np.vstack(faces)


def _side_normal(shape: str, point: np.ndarray, center_z: float, a: float) -> np.ndarray:
    if shape == "sphere":
        n = point - np.array([0.0, 0.0, center_z])
    elif shape == "cylinder":
        n = np.array([point[0], point[1], 0.0])
    else:
        n = np.zeros(3)
        k = int(np.argmax(np.abs(point[:2])))
        n[k] = np.sign(point[k])
    return n / np.linalg.norm(n)


@dataclass
class _Part:
    label: str
    shape: str
    points: np.ndarray
    z0: float
    height: float
    width: float


def _build_object(rng, labels, points_per_part):
    parts = []
    z = 0.0
    for i, label in enumerate(labels):
        shape = SHAPES[i % len(SHAPES)]
        r = rng.uniform(0.03, 0.05)
        if shape == "sphere":
            h = 2 * r
            pts = _sphere(rng, points_per_part, r, z)
        elif shape == "cylinder":
            h = rng.uniform(0.06, 0.12)
            pts = _cylinder(rng, points_per_part, r, z, h)
        else:
            h = rng.uniform(0.05, 0.1)
            pts = _box(rng, points_per_part, 2 * r, z, h)
        parts.append(_Part(label, shape, pts, z, h, r))
        z += h
    return parts


def _make_grasp(rng, part: _Part, hand: StubHandModel, penetration: float) -> np.ndarray:
    # a side-surface point away from the junctions; cap points sit exactly at z0 / z0 + height
    side = part.points[(part.points[:, 2] > part.z0 + 0.15 * part.height) &
                       (part.points[:, 2] < part.z0 + 0.85 * part.height)]
    p = side[rng.integers(len(side))]
    normal = _side_normal(part.shape, p, part.z0 + part.height / 2, part.width)
    g = np.zeros(GRASP_DIM)
    g[GLOBAL_ROT] = rng.normal(0, 0.5, 3)
    g[JOINTS] = rng.normal(0, 0.3, JOINTS.stop - JOINTS.start)
    g[SHAPE] = rng.normal(0, 0.3, SHAPE.stop - SHAPE.start)
    g[TRANSLATION] = p + normal * (hand.radius - penetration)
    return g


def generate_object(rng, category: str, object_id: str, labels: list[str], points_per_part: int,
                    grasps_per_object: int, tasks: list[str], hand: StubHandModel,
                    lam: float = DEFAULT_CONTACT_THRESHOLD) -> SyntheticObject:
    parts = _build_object(rng, labels, points_per_part)
    cloud = PointCloud(np.vstack([p.points for p in parts]))
    segments = []
    start = 0
    for p in parts:
        segments.append(PartSegment(p.label, 1, np.arange(start, start + len(p.points))))
        start += len(p.points)
    part_clouds = [cloud.subset(s.point_indices) for s in segments]
    obj = SyntheticObject(category, object_id, cloud, segments)
    for j in range(grasps_per_object):
        target = j % len(parts)
        for _ in range(MAX_TRIES):
            g = _make_grasp(rng, parts[target], hand, penetration=0.5 * lam)
            surface = hand.surface(g)
            scores = [contact_score(pc, surface, lam) for pc in part_clouds]
            best = int(np.argmax(scores))  # first index on ties
            if best == target and scores[best] > 0:
                break
        else:
            raise GenerationError(f"could not place a grasp on part {parts[target].label!r} of {object_id}")
        obj.grasps.append((g, parts[target].label, tasks[j % len(tasks)]))
    return obj


def generate_synthetic_dataset(spec: dict, seed: int, out: str | Path | None = None,
                               hand: StubHandModel | None = None) -> list[SyntheticObject]:
    """Build (and optionally write) a dataset from a spec such as::

        {"categories": [{"name": "bottle", "parts": ["body", "neck"],
                         "objects": 2, "grasps_per_object": 4, "tasks": ["hold"]}],
         "points_per_part": 512}
    """
    hand = hand or StubHandModel()
    points_per_part = int(spec.get("points_per_part", 512))
    min_points = int(spec.get("min_part_points", DEFAULT_MIN_PART_POINTS))
    if points_per_part < min_points:
        raise GenerationError(f"points_per_part={points_per_part} is below min_part_points={min_points}")
    lam = float(spec.get("contact_threshold", DEFAULT_CONTACT_THRESHOLD))
    rng = np.random.default_rng(seed)
    objects = []
    for cat in spec["categories"]:
        labels = list(cat["parts"])
        if not labels or len(set(labels)) != len(labels):
            raise GenerationError(f"category {cat['name']!r} needs distinct part labels")
        for k in range(int(cat.get("objects", 1))):
            obj = generate_object(rng, cat["name"], f"{cat['name']}_{k:03d}", labels, points_per_part,
                                  int(cat.get("grasps_per_object", 4)), list(cat.get("tasks", ["hold"])),
                                  hand, lam)
            objects.append(obj)
    if out is not None:
        write_dataset(objects, spec, seed, out)
    return objects


def write_dataset(objects: list[SyntheticObject], spec: dict, seed: int, out: str | Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    categories = {}
    for obj in objects:
        categories.setdefault(obj.category, [s.label for s in obj.segments])
        d = out / obj.category / obj.object_id
        (d / "segments").mkdir(parents=True, exist_ok=True)
        save_xyz(obj.cloud, d / "object.xyz")
        for i, seg in enumerate(obj.segments):
            write_segment(seg, d / "segments" / f"{i:02d}_{seg.label.replace(' ', '_')}.json")
        records = [{"grasp": [float(v) for v in g], "part_label": label, "task": task}
                   for g, label, task in obj.grasps]
        (d / "grasps.json").write_text(json.dumps(records, indent=1))
        obj.path = d
    manifest = {"seed": seed, "spec": spec, "categories": categories,
                "objects": [f"{o.category}/{o.object_id}" for o in objects]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))


def load_dataset(root: str | Path) -> tuple[list[SyntheticObject], dict]:
    root = Path(root)
    manifest = json.loads((root / "manifest.json").read_text())
    objects = []
    for rel in manifest["objects"]:
        d = root / rel
        category, object_id = rel.split("/")
        records = json.loads((d / "grasps.json").read_text())
        grasps = [(np.asarray(r["grasp"], dtype=np.float64), r["part_label"], r["task"]) for r in records]
        objects.append(SyntheticObject(category, object_id, load_xyz(d / "object.xyz"),
                                       read_segments(d / "segments"), grasps, d))
    return objects, manifest


def synthetic_dumbbell(seed: int = 0, points_per_part: int = 400, separation: float = 0.4):
    """Two spheres ``A`` and ``B``; the returned hand model can only ever reach ``B``.

    The hand is anchored at B's centre with at most 1 cm of reach, so any grasp
    vector yields a hand that hugs B and stays far from A.
    """
    rng = np.random.default_rng(seed)
    r = 0.04
    a = fibonacci_sphere(points_per_part, r) + np.array([-separation, 0.0, 0.0])
    b = fibonacci_sphere(points_per_part, r) + rng.normal(0, 1e-4, (points_per_part, 3))
    cloud = PointCloud(np.vstack([a, b]))
    segments = [PartSegment("A", 1, np.arange(points_per_part)),
                PartSegment("B", 1, np.arange(points_per_part, 2 * points_per_part))]
    hand = StubHandModel(radius=r, anchor=np.zeros(3), max_reach=0.01, basis_scale=0.0005)
    return cloud, segments, hand
