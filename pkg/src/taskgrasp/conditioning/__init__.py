from .attention import DEFAULT_ATTN_DIM, CrossAttention, FusedFeature, cross_attention
from .condition import Conditioner, ConditioningConfig, build_condition, split_condition
from .pointnet import (
    SetAbstractionConfig,
    SetAbstractionEncoder,
    canonicalize,
    encode_pointcloud,
    farthest_point_sample,
    knn_indices,
    prepare_points,
)

__all__ = [
    "DEFAULT_ATTN_DIM", "Conditioner", "ConditioningConfig", "CrossAttention", "FusedFeature",
    "SetAbstractionConfig", "SetAbstractionEncoder", "build_condition", "canonicalize",
    "cross_attention", "encode_pointcloud", "farthest_point_sample", "knn_indices", "prepare_points",
    "split_condition",
]
