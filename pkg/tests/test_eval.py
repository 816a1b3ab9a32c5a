import json
from types import SimpleNamespace

import numpy as np
import pytest

from taskgrasp.errors import ConfigError, GeometryError, InsufficientDataError, PreconditionError
from taskgrasp.eval import (FRECHET_LABEL, EvalSample, MetricReport, boundary_points, build_report, contact_ratio,
                            corrupt_segments, diversity, frechet_distance, frechet_feature_distance,
                            gaussian_stats, load_result_samples, penetration_depth, penetration_volume,
                            selection_robustness_curve)
from taskgrasp.geometry import PartSegment, PointCloud
from taskgrasp.pipeline import StubHandModel, fibonacci_sphere, generate_synthetic_dataset
from taskgrasp.pipeline.hand import TRANSLATION


def cube_surface(lo, size, spacing):
    """Points on the six faces of an axis-aligned cube, on a regular lattice."""
    n = int(round(size / spacing)) + 1
    u = np.linspace(0, size, n)
    a, b = np.meshgrid(u, u, indexing="ij")
    a, b = a.ravel(), b.ravel()
    faces = []
    for axis in range(3):
        for side in (0.0, size):
            pts = np.empty((len(a), 3))
            others = [k for k in range(3) if k != axis]
            pts[:, axis] = side
            pts[:, others[0]] = a
            pts[:, others[1]] = b
            faces.append(pts)
    return PointCloud(np.unique(np.vstack(faces), axis=0) + np.asarray(lo))


# -- penetration --------------------------------------------------------------------------

def test_penetration_volume_disjoint():
    a = cube_surface([0, 0, 0], 0.1, 0.0025)
    b = cube_surface([1.1, 0, 0], 0.1, 0.0025)
    assert penetration_volume(a, b, 0.01) == 0.0


@pytest.mark.parametrize("voxel", [0.01, 0.005, 0.0025])
def test_penetration_volume_converges_on_boxes(voxel):
    a = cube_surface([0, 0, 0], 0.1, voxel / 4)
    b = cube_surface([0.05, 0, 0], 0.1, voxel / 4)
    analytic = 0.1 * 0.1 * 0.05 * 1e6
    bound = 6 * (0.1 * 0.1) * voxel * 1e6
    got = penetration_volume(a, b, voxel)
    assert abs(got - analytic) <= bound


def test_penetration_volume_identical_equals_filled_volume():
    a = cube_surface([0, 0, 0], 0.1, 0.0025)
    got = penetration_volume(a, a, 0.01)
    # filled cells of a 0.1 m cube at 1 cm: between 10^3 and 11^3 cells
    assert 1000.0 <= got <= 1331.0 + 1e-9


def test_penetration_volume_errors():
    flat = PointCloud(np.column_stack([np.linspace(0, 1, 10), np.zeros(10), np.zeros(10)]))
    with pytest.raises(GeometryError):
        penetration_volume(flat, flat, 0.01)
    a = cube_surface([0, 0, 0], 0.1, 0.01)
    with pytest.raises(GeometryError):
        penetration_volume(a, a, 0.0)


def test_penetration_depth_sphere_centre():
    r = 0.05
    sphere = PointCloud(fibonacci_sphere(4000, r))
    depth = penetration_depth(PointCloud([[0.0, 0.0, 0.0]]), sphere, 0.005)
    assert depth == pytest.approx(r * 100, abs=1e-9)


def test_penetration_depth_outside_and_bound():
    r = 0.05
    sphere = PointCloud(fibonacci_sphere(4000, r))
    assert penetration_depth(PointCloud([[1.0, 0, 0]]), sphere) == 0.0
    rng = np.random.default_rng(0)
    hand = PointCloud(rng.uniform(-0.06, 0.06, (500, 3)))
    assert 0.0 < penetration_depth(hand, sphere) <= r * 100 + 1e-9


def test_penetration_depth_empty():
    with pytest.raises(PreconditionError):
        penetration_depth(PointCloud(np.empty((0, 3))), PointCloud([[0.0, 0, 0]]))


# -- contact ratio and diversity ----------------------------------------------------------

def _result(cloud, g):
    return SimpleNamespace(selected=SimpleNamespace(grasp=g), request=SimpleNamespace(object_cloud=cloud))


def test_contact_ratio_examples():
    hand = StubHandModel()
    obj = PointCloud(hand.surface(np.zeros(61)).points[:50])
    touching = np.zeros(61)
    away = np.zeros(61)
    away[TRANSLATION] = [2.0, 0, 0]
    assert contact_ratio([_result(obj, touching)] * 3, hand) == 1.0
    assert contact_ratio([_result(obj, away)] * 3, hand) == 0.0
    assert contact_ratio([_result(obj, touching), _result(obj, away)] * 2, hand) == 0.5
    with pytest.raises(PreconditionError):
        contact_ratio([], hand)


def test_diversity_examples():
    g = np.random.default_rng(1).normal(size=(6, 61))
    assert diversity(np.tile(g[0], (4, 1))) == 0.0
    d = 0.3
    pair = np.zeros((2, 61))
    pair[1, 17] = d
    assert diversity(pair) == pytest.approx(d ** 2 / (2 * 61), rel=1e-12)
    assert diversity(2.5 * g) == pytest.approx(2.5 ** 2 * diversity(g), rel=1e-12)
    assert diversity(g[::-1]) == pytest.approx(diversity(g), rel=1e-12)
    with pytest.raises(InsufficientDataError):
        diversity(g[:1])


# -- Frechet distance ---------------------------------------------------------------------

def test_frechet_identical_sets():
    x = np.random.default_rng(2).normal(size=(200, 5))
    assert frechet_feature_distance(list(x), list(x), lambda v: v) <= 1e-8


def test_frechet_univariate_mean_shift():
    x = np.random.default_rng(3).normal(size=400)
    d = 1.7
    got = frechet_feature_distance(list(x), list(x + d), lambda v: v)
    assert got == pytest.approx(d ** 2, abs=1e-8)


def test_frechet_symmetric_and_closed_form():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=(300, 4)), rng.normal(size=(250, 4)) @ rng.normal(size=(4, 4)) + 1.0
    ab = frechet_feature_distance(list(a), list(b), lambda v: v)
    ba = frechet_feature_distance(list(b), list(a), lambda v: v)
    assert abs(ab - ba) <= 1e-8 and ab >= 0
    # diagonal covariances: sum of per-coordinate (mu diff^2 + (s_a - s_b)^2)
    mu_a, mu_b = np.array([0.0, 1.0]), np.array([2.0, -1.0])
    sa, sb = np.diag([4.0, 1.0]), np.diag([1.0, 9.0])
    assert frechet_distance(mu_a, sa, mu_b, sb) == pytest.approx(4 + 4 + (2 - 1) ** 2 + (1 - 3) ** 2, abs=1e-12)


def test_frechet_small_sets_are_regularised():
    x = np.random.default_rng(5).normal(size=(3, 10))
    mu, sigma = gaussian_stats(x)
    assert np.linalg.eigvalsh(sigma).min() > 0
    assert frechet_feature_distance(list(x), list(x), lambda v: v) <= 1e-8


def test_frechet_rejects_indefinite():
    with pytest.raises(ArithmeticError):
        frechet_distance(np.zeros(2), np.diag([1.0, -1.0]), np.zeros(2), np.eye(2))


# -- segment corruption -------------------------------------------------------------------

def _two_slabs(n=400, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, (n, 3))
    left = np.flatnonzero(pts[:, 0] < 0.5)
    right = np.flatnonzero(pts[:, 0] >= 0.5)
    return PointCloud(pts), [PartSegment("L", 1, left), PartSegment("R", 1, right)]


def _boundary_oracle(cloud, segments):
    owner = {}
    for k, s in enumerate(segments):
        for i in s.point_indices:
            owner[int(i)] = k
    pts = cloud.points
    out = []
    for i in owner:
        d = [(np.linalg.norm(pts[i] - pts[j]), j) for j in owner if j != i]
        _, nearest = min(d)
        if owner[nearest] != owner[i]:
            out.append(i)
    return sorted(out)


def _owners(segments, n):
    o = np.full(n, -1)
    for k, s in enumerate(segments):
        o[s.point_indices] = k
    return o


def test_boundary_set_matches_oracle():
    cloud, segs = _two_slabs(200)
    got, _, _ = boundary_points(cloud, segs)
    assert sorted(got.tolist()) == _boundary_oracle(cloud, segs)


@pytest.mark.parametrize("level", [0.0, 0.1, 0.25, 0.5, 0.9, 1.0])
def test_corruption_count(level):
    cloud, segs = _two_slabs()
    boundary = _boundary_oracle(cloud, segs)
    out = corrupt_segments(cloud, segs, level, seed=3)
    before, after = _owners(segs, len(cloud)), _owners(out, len(cloud))
    changed = np.flatnonzero(before != after)
    assert abs(len(changed) - level * len(boundary)) <= 1
    assert set(changed.tolist()) <= set(boundary)
    assert sum(len(s) for s in out) == len(cloud)
    if level == 1.0:
        assert sorted(changed.tolist()) == boundary


def test_corruption_level_zero_is_identity_and_seeded():
    cloud, segs = _two_slabs()
    out = corrupt_segments(cloud, segs, 0.0, seed=1)
    assert [s.point_indices.tolist() for s in out] == [s.point_indices.tolist() for s in segs]
    a = corrupt_segments(cloud, segs, 0.5, seed=1)
    b = corrupt_segments(cloud, segs, 0.5, seed=1)
    assert [s.point_indices.tolist() for s in a] == [s.point_indices.tolist() for s in b]
    with pytest.raises(ConfigError):
        corrupt_segments(cloud, segs, 1.5)


def test_robustness_curve_shape():
    spec = {"categories": [{"name": "mug", "parts": ["body", "handle"], "objects": 2, "grasps_per_object": 4}],
            "points_per_part": 128}
    objects = generate_synthetic_dataset(spec, 0)
    curve = selection_robustness_curve(objects, StubHandModel(), levels=(0.0, 0.5, 1.0))
    assert [p.level for p in curve] == [0.0, 0.5, 1.0]
    assert curve[0].accuracy == 1.0
    assert all(p.trials == 8 for p in curve)


# -- report -------------------------------------------------------------------------------

def test_report_from_result_files(tmp_path):
    hand = StubHandModel()
    obj = fibonacci_sphere(500, 0.05)
    np.savetxt(tmp_path / "obj.xyz", obj)
    rng = np.random.default_rng(6)
    for i in range(3):
        g = rng.normal(0, 0.1, 61)
        g[TRANSLATION] = [0.08, 0.0, 0.0]
        doc = {"request": {"category": "ball", "task": "hold", "seed": i, "object": "obj.xyz"},
               "selected": {"part_label": "shell", "score": 0.1, "grasp": g.tolist()}, "candidates": [],
               "versions": {}}
        (tmp_path / f"r{i}.json").write_text(json.dumps(doc))
    samples = load_result_samples(tmp_path)
    assert len(samples) == 3 and isinstance(samples[0], EvalSample)
    ref = [rng.normal(0, 0.1, 61) for _ in range(5)]
    report = build_report(samples, hand, reference=ref, feature_fn=lambda g: g[:2], workers=2)
    assert isinstance(report, MetricReport)
    assert report.sample_count == 3 and report.frechet_label == FRECHET_LABEL
    assert 0.0 <= report.contact_ratio <= 1.0 and report.diversity >= 0 and report.frechet_distance >= 0
    assert report.penetration_volume_cm3 > 0
    assert build_report(samples, hand).frechet_distance is None


def test_report_requires_object_reference(tmp_path):
    (tmp_path / "r.json").write_text(json.dumps({"request": {}, "selected": {"part_label": "x", "grasp": [0] * 61}}))
    with pytest.raises(PreconditionError):
        load_result_samples(tmp_path)
