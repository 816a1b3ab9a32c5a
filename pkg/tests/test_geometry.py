import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from taskgrasp.errors import ConfigError, GeometryError, NoValidPartsError, PreconditionError
from taskgrasp.geometry import (GraspCandidate, PartSegment, PointCloud, contact_score, filter_valid_parts,
                                load_xyz, min_distances, save_xyz, select_best)


def brute_min_distances(q, t):
    out = []
    for a in q:
        out.append(min(float(np.sqrt(sum((a[k] - b[k]) ** 2 for k in range(3)))) for b in t))
    return np.array(out)


def brute_contact(part, hand, lam):
    return sum(d < lam for d in brute_min_distances(part, hand)) / len(part)


clouds = st.integers(1, 40).flatmap(
    lambda n: st.lists(st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3), min_size=n, max_size=n))


# -- point clouds and files ---------------------------------------------------------------

def test_cloud_rejects_nan_and_bad_shape():
    with pytest.raises(GeometryError):
        PointCloud(np.array([[0.0, np.nan, 0.0]]))
    with pytest.raises(GeometryError):
        PointCloud(np.zeros((3, 2)))


def test_cloud_is_immutable():
    pc = PointCloud(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        pc.points[0, 0] = 1.0


def test_xyz_roundtrip_and_comments(tmp_path):
    pts = np.random.default_rng(0).normal(size=(20, 3))
    save_xyz(PointCloud(pts), tmp_path / "a.xyz")
    assert np.array_equal(load_xyz(tmp_path / "a.xyz").points, pts)
    (tmp_path / "b.xyz").write_text("# header\n1 2 3  # trailing\n\n4 5 6\n")
    assert load_xyz(tmp_path / "b.xyz").points.tolist() == [[1, 2, 3], [4, 5, 6]]


@pytest.mark.parametrize("body", ["1 2 nan\n", "1 2 inf\n", "1 2\n", "# nothing\n"])
def test_xyz_loader_rejects(tmp_path, body):
    (tmp_path / "c.xyz").write_text(body)
    with pytest.raises(GeometryError):
        load_xyz(tmp_path / "c.xyz")


def test_segment_rejects_duplicates_and_out_of_range():
    with pytest.raises(GeometryError):
        PartSegment("a", 1, [0, 0])
    seg = PartSegment("a", 1, [0, 5])
    with pytest.raises(GeometryError):
        seg.cloud(PointCloud(np.zeros((3, 3))))


# -- min_distances ------------------------------------------------------------------------

def test_min_distances_examples():
    q = PointCloud([[0.0, 0.0, 0.0]])
    assert min_distances(q, PointCloud([[0.0, 0, 0], [1, 0, 0]])).tolist() == [0.0]
    assert min_distances(q, PointCloud([[3.0, 4, 0]])).tolist() == [5.0]


def test_min_distances_matches_exhaustive_scan():
    rng = np.random.default_rng(1)
    q, t = rng.normal(size=(100, 3)), rng.normal(size=(100, 3))
    np.testing.assert_allclose(min_distances(PointCloud(q), PointCloud(t)), brute_min_distances(q, t),
                               rtol=0, atol=1e-15)


def test_min_distances_across_blocks():
    rng = np.random.default_rng(2)
    q, t = rng.normal(size=(2500, 3)), rng.normal(size=(7, 3))
    ref = np.sqrt(((q[:, None] - t[None]) ** 2).sum(-1)).min(1)
    np.testing.assert_allclose(min_distances(PointCloud(q), PointCloud(t)), ref, atol=1e-15)


def test_min_distances_empty():
    with pytest.raises(PreconditionError):
        min_distances(PointCloud(np.empty((0, 3))), PointCloud(np.zeros((1, 3))))


# -- contact_score ------------------------------------------------------------------------

def test_contact_score_examples():
    rng = np.random.default_rng(3)
    pc = PointCloud(rng.normal(size=(50, 3)))
    assert contact_score(pc, pc, 0.005) == 1.0
    assert contact_score(pc, pc.translated([1000.0, 0, 0]), 0.005) == 0.0
    part = PointCloud([[0.001, 0, 0], [0.002, 0, 0], [0.02, 0, 0], [0.03, 0, 0]])
    assert contact_score(part, PointCloud([[0.0, 0, 0]]), 0.005) == 0.5


def test_contact_threshold_is_strict():
    part = PointCloud([[0.005, 0, 0]])
    assert contact_score(part, PointCloud([[0.0, 0, 0]]), 0.005) == 0.0


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_contact_score_bad_lambda(lam):
    with pytest.raises(ConfigError):
        contact_score(PointCloud([[0.0, 0, 0]]), PointCloud([[0.0, 0, 0]]), lam)


@settings(max_examples=60, deadline=None)
@given(clouds, clouds, st.floats(1e-3, 2.0))
def test_contact_score_matches_oracle(part, hand, lam):
    got = contact_score(PointCloud(part), PointCloud(hand), lam)
    assert got == brute_contact(np.array(part), np.array(hand), lam)
    assert 0.0 <= got <= 1.0


@settings(max_examples=40, deadline=None)
@given(clouds, clouds, st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_contact_score_monotone_in_lambda(part, hand, a, b):
    lo, hi = sorted((a, b))
    assert contact_score(PointCloud(part), PointCloud(hand), lo) <= contact_score(PointCloud(part), PointCloud(hand), hi)


def test_contact_score_rigid_invariance():
    rng = np.random.default_rng(4)
    for _ in range(20):
        part, hand = rng.uniform(-0.05, 0.05, (80, 3)), rng.uniform(-0.05, 0.05, (60, 3))
        rot = Rotation.random(random_state=rng).as_matrix()
        shift = rng.normal(size=3)
        before = contact_score(PointCloud(part), PointCloud(hand), 0.01)
        after = contact_score(PointCloud(part @ rot.T + shift), PointCloud(hand @ rot.T + shift), 0.01)
        # counts can only differ for distances within rounding of lambda
        assert abs(before - after) <= 1e-9 or _near_threshold(part, hand, 0.01)


def _near_threshold(part, hand, lam):
    d = brute_min_distances(part, hand)
    return np.any(np.abs(d - lam) < 1e-12)


# -- filtering and selection --------------------------------------------------------------

def _seg(label, n):
    return PartSegment(label, 1, np.arange(n))


def test_filter_valid_parts_examples():
    segs = [_seg("a", 10), _seg("b", 100)]
    assert [s.label for s in filter_valid_parts(segs, 50)] == ["b"]
    assert [s.valid for s in segs] == [False, True]
    assert len(filter_valid_parts(segs, 1)) == 2
    assert [s.label for s in filter_valid_parts([_seg("a", 49), _seg("b", 50)], 50)] == ["b"]
    assert filter_valid_parts([_seg("a", 3)], 50) == []


def test_filter_valid_parts_bad_threshold():
    with pytest.raises(ConfigError):
        filter_valid_parts([], 0)


def _cands(scores):
    return [GraspCandidate(_seg(f"p{i}", 1), np.zeros(61), s) for i, s in enumerate(scores)]


def test_select_best_examples():
    assert select_best(_cands([0.2, 0.8, 0.5])).part.label == "p1"
    assert select_best(_cands([0.4, 0.4])).part.label == "p0"
    with pytest.raises(NoValidPartsError):
        select_best([])


def test_select_best_permutation_with_unique_max():
    cands = _cands([0.1, 0.7, 0.3, 0.2])
    for perm in itertools.permutations(cands):
        assert select_best(list(perm)).part.label == "p1"
