import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import linear, scalar_attention
from taskgrasp.conditioning import (Conditioner, ConditioningConfig, CrossAttention, FusedFeature,
                                    SetAbstractionConfig, SetAbstractionEncoder, build_condition,
                                    cross_attention, encode_pointcloud, farthest_point_sample, knn_indices,
                                    prepare_points, split_condition)
from taskgrasp.errors import AttentionError, ConfigError, PreconditionError, ShapeError
from taskgrasp.geometry import PointCloud
from taskgrasp.language import HashTextEncoder, TokenFeatures, encode_text

SMALL = SetAbstractionConfig(num_layers=2, sampled_points=[64, 16], embedding_sizes=[16, 32], group_size=8)


def _encoder(cfg, seed=0):
    torch.manual_seed(seed)
    return SetAbstractionEncoder(cfg).double().eval()


# -- farthest point sampling --------------------------------------------------------------

def test_fps_examples():
    pts = np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0]])
    assert farthest_point_sample(pts, 1, 1).tolist() == [1]
    assert farthest_point_sample(pts, 2, 0).tolist() == [0, 2]
    assert sorted(farthest_point_sample(pts, 3, 0).tolist()) == [0, 1, 2]


def test_fps_matches_exhaustive_greedy():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(40, 3))
    got = farthest_point_sample(pts, 12, 5)
    chosen = [5]
    while len(chosen) < 12:
        best, best_d = None, -1.0
        for i in range(len(pts)):
            if i in chosen:
                continue
            d = min(np.linalg.norm(pts[i] - pts[j]) for j in chosen)
            if d > best_d:
                best, best_d = i, d
        chosen.append(best)
    assert got.tolist() == chosen


def test_fps_ties_take_lowest_index():
    pts = np.array([[0.0, 0, 0], [1, 0, 0], [-1, 0, 0], [0, 1, 0]])
    assert farthest_point_sample(pts, 2, 0).tolist() == [0, 1]


def test_fps_duplicates_stay_distinct():
    pts = np.zeros((5, 3))
    assert sorted(farthest_point_sample(pts, 5, 0).tolist()) == [0, 1, 2, 3, 4]


def test_fps_bad_m():
    with pytest.raises(PreconditionError):
        farthest_point_sample(np.zeros((3, 3)), 4)


def test_knn_is_exact():
    rng = np.random.default_rng(1)
    pts, centers = rng.normal(size=(50, 3)), rng.normal(size=(5, 3))
    idx = knn_indices(centers, pts, 6)
    for c, row in zip(centers, idx):
        d = np.linalg.norm(pts - c, axis=1)
        assert set(row.tolist()) == set(np.argsort(d)[:6].tolist())


# -- set abstraction encoder --------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        SetAbstractionConfig(num_layers=2, sampled_points=[16, 64], embedding_sizes=[8, 8])
    with pytest.raises(ConfigError):
        SetAbstractionConfig(num_layers=3, sampled_points=[16, 8], embedding_sizes=[8, 8])


def test_default_encoder_output_length():
    pc = PointCloud(np.random.default_rng(2).normal(size=(300, 3)))
    cfg = SetAbstractionConfig()
    torch.manual_seed(0)
    vec = encode_pointcloud(pc, cfg, SetAbstractionEncoder(cfg).eval())
    assert vec.shape == (512,) and np.all(np.isfinite(vec))


def test_encoder_deterministic_translation_and_permutation():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(200, 3))
    enc = _encoder(SMALL)
    ref = encode_pointcloud(PointCloud(pts), SMALL, enc)
    assert np.array_equal(ref, encode_pointcloud(PointCloud(pts), SMALL, enc))
    shifted = encode_pointcloud(PointCloud(pts + np.array([3.0, -2.0, 0.5])), SMALL, enc)
    np.testing.assert_allclose(shifted, ref, atol=1e-10)
    for _ in range(5):
        perm = rng.permutation(len(pts))
        assert np.array_equal(encode_pointcloud(PointCloud(pts[perm]), SMALL, enc), ref)


def test_small_cloud_is_upsampled():
    pts = prepare_points(PointCloud(np.random.default_rng(4).normal(size=(10, 3))), SMALL)
    assert len(pts) == 64
    assert np.allclose(np.linalg.norm(pts, axis=1).max(), 1.0)


def test_encoder_shape_mismatch():
    other = SetAbstractionConfig(num_layers=2, sampled_points=[64, 16], embedding_sizes=[16, 64], group_size=8)
    with pytest.raises(ShapeError):
        encode_pointcloud(PointCloud(np.zeros((70, 3)) + np.arange(70)[:, None]), other, _encoder(SMALL))


# -- cross attention ----------------------------------------------------------------------

def _features(matrix, mask=None):
    matrix = np.asarray(matrix, dtype=np.float64)
    mask = np.ones(len(matrix), dtype=bool) if mask is None else np.asarray(mask)
    matrix = np.where(mask[:, None], matrix, 0.0)
    return TokenFeatures(matrix, mask)


def _set_weights(attn, wq, bq, wk, bk, wv, bv):
    with torch.no_grad():
        for lin, w, b in ((attn.q, wq, bq), (attn.k, wk, bk), (attn.v, wv, bv)):
            lin.weight.copy_(torch.tensor(w, dtype=torch.float64))
            lin.bias.copy_(torch.tensor(b, dtype=torch.float64))


def test_two_by_three_matches_hand_computation():
    attn = CrossAttention(token_dim=3, attn_dim=2).double()
    wq = [[0.5, -1.0, 0.25], [1.5, 0.0, -0.5]]
    wk = [[1.0, 0.5, 0.0], [-0.25, 1.0, 2.0]]
    wv = [[0.3, -0.7, 1.1], [2.0, 0.4, -0.6]]
    bq, bk, bv = [0.1, -0.2], [0.0, 0.3], [-0.5, 0.25]
    _set_weights(attn, wq, bq, wk, bk, wv, bv)
    cat = [[1.0, 2.0, -1.0], [0.5, -0.5, 3.0]]
    part = [[0.2, 0.1, 0.4], [-1.0, 1.0, 0.0], [2.0, -0.3, 0.7]]
    fused = cross_attention(_features(cat), _features(part), attn)
    q = [linear(wq, bq, x) for x in cat]
    k = [linear(wk, bk, x) for x in part]
    v = [linear(wv, bv, x) for x in part]
    out, weights = scalar_attention(q, k, v, np.sqrt(2.0))
    np.testing.assert_allclose(fused.matrix, out, rtol=0, atol=1e-12)
    np.testing.assert_allclose(fused.attention, weights, rtol=0, atol=1e-12)
    np.testing.assert_allclose(fused.pooled, np.mean(out, axis=0), rtol=0, atol=1e-12)


def test_single_key_returns_its_value_row():
    torch.manual_seed(0)
    attn = CrossAttention(token_dim=16, attn_dim=8).double()
    rng = np.random.default_rng(5)
    part = _features(rng.normal(size=(4, 16)), [False, True, False, False])
    for scale in (0.1, 1.0, 100.0):
        fused = cross_attention(_features(scale * rng.normal(size=(5, 16))), part, attn)
        v_row = attn.v(torch.tensor(part.matrix)).detach().numpy()[1]
        assert np.array_equal(fused.matrix, np.tile(v_row, (5, 1)))


def test_attention_rows_stochastic_and_in_hull():
    torch.manual_seed(1)
    attn = CrossAttention(token_dim=32, attn_dim=8).double()
    rng = np.random.default_rng(6)
    for _ in range(10):
        cat = _features(rng.normal(size=(12, 32)) * 3, rng.random(12) < 0.7)
        part_mask = rng.random(9) < 0.6
        part_mask[0] = True
        part = _features(rng.normal(size=(9, 32)) * 3, part_mask)
        fused = cross_attention(cat, part, attn)
        np.testing.assert_allclose(fused.attention.sum(axis=1), 1.0, atol=1e-6)
        assert np.all(fused.attention[:, ~part_mask] == 0)
        v = attn.v(torch.tensor(part.matrix[part_mask])).detach().numpy()
        assert np.all(fused.matrix >= v.min(axis=0) - 1e-6) and np.all(fused.matrix <= v.max(axis=0) + 1e-6)
        np.testing.assert_allclose(fused.pooled, fused.matrix[cat.mask].mean(axis=0), atol=1e-12)


def test_all_keys_masked():
    attn = CrossAttention(token_dim=4, attn_dim=2).double()
    with pytest.raises(AttentionError):
        cross_attention(_features(np.ones((2, 4))), _features(np.ones((2, 4)), [False, False]), attn)


def test_attention_dim_mismatch():
    with pytest.raises(ShapeError):
        cross_attention(_features(np.ones((2, 5))), _features(np.ones((2, 5))), CrossAttention(4, 2))


def test_default_attention_on_encoded_text():
    torch.manual_seed(0)
    attn = CrossAttention()
    enc = HashTextEncoder()
    fused = cross_attention(encode_text(enc, "pour water from the mug"), encode_text(enc, "the handle is a loop"),
                            attn)
    assert fused.matrix.shape == (200, 128) and fused.pooled.shape == (128,)


# -- condition assembly -------------------------------------------------------------------

def _fused(pooled):
    return FusedFeature(np.zeros((1, len(pooled))), np.asarray(pooled, dtype=np.float64), np.ones((1, 1)))


def test_build_condition_zero_and_length():
    cond = build_condition(np.zeros(512), np.zeros(512), _fused(np.zeros(128)), 512, 128)
    assert cond.shape == (1152,) and not cond.any()
    assert ConditioningConfig().cond_dim == 1152


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 16), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_build_condition_slices_recover_inputs(geo, att, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=geo), rng.normal(size=geo), rng.normal(size=att)
    parts = split_condition(build_condition(a, b, _fused(c)), geo)
    for got, want in zip(parts, (a, b, c)):
        assert np.array_equal(got, want)


def test_build_condition_mismatch():
    with pytest.raises(ShapeError):
        build_condition(np.zeros(512), np.zeros(511), _fused(np.zeros(128)))
    with pytest.raises(ShapeError):
        build_condition(np.zeros(512), np.zeros(512), _fused(np.zeros(64)), 512, 128)


def test_conditioner_is_seeded_and_frozen():
    cfg = ConditioningConfig(set_abstraction=SMALL)
    a, b = Conditioner(cfg, seed=4), Conditioner(cfg, seed=4)
    for (_, ma), (_, mb) in zip(a.modules().items(), b.modules().items()):
        for pa, pb in zip(ma.parameters(), mb.parameters()):
            assert torch.equal(pa, pb) and not pa.requires_grad
    pc = PointCloud(np.random.default_rng(7).normal(size=(100, 3)))
    enc = HashTextEncoder()
    cond = a.condition(a.encode_object(pc), pc, encode_text(enc, "cut bread"), encode_text(enc, "sharp blade"))
    assert cond.shape == (cfg.cond_dim,) == (2 * 32 + 128,)
    # object and part encoders are distinct weight sets
    assert not np.array_equal(a.encode_object(pc), a.encode_part(pc))
