"""Condition assembly and the bundle of frozen conditioning networks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import ShapeError
from ..geometry import PointCloud
from ..language.encoder import TokenFeatures
from .attention import DEFAULT_ATTN_DIM, CrossAttention, FusedFeature, cross_attention
from .pointnet import SetAbstractionConfig, SetAbstractionEncoder, encode_pointcloud


def build_condition(f_obj: np.ndarray, f_part: np.ndarray, f_fused: FusedFeature,
                    geo_dim: int | None = None, attn_dim: int | None = None) -> np.ndarray:
    """``[object geometry | part geometry | pooled fused text]``."""
    f_obj = np.asarray(f_obj, dtype=np.float64).reshape(-1)
    f_part = np.asarray(f_part, dtype=np.float64).reshape(-1)
    pooled = np.asarray(f_fused.pooled, dtype=np.float64).reshape(-1)
    if len(f_obj) != len(f_part):
        raise ShapeError(f"object/part geometry widths differ: {len(f_obj)} vs {len(f_part)}")
    if geo_dim is not None and len(f_obj) != geo_dim:
        raise ShapeError(f"geometry features must have length {geo_dim}, got {len(f_obj)}")
    if attn_dim is not None and len(pooled) != attn_dim:
        raise ShapeError(f"fused feature must have length {attn_dim}, got {len(pooled)}")
    return np.concatenate([f_obj, f_part, pooled])


def split_condition(cond: np.ndarray, geo_dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return cond[:geo_dim], cond[geo_dim:2 * geo_dim], cond[2 * geo_dim:]


@dataclass
class ConditioningConfig:
    set_abstraction: SetAbstractionConfig = field(default_factory=SetAbstractionConfig)
    token_dim: int = 768
    attn_dim: int = DEFAULT_ATTN_DIM

    @property
    def cond_dim(self) -> int:
        return 2 * self.set_abstraction.out_dim + self.attn_dim

    def to_dict(self) -> dict:
        return {"set_abstraction": self.set_abstraction.to_dict(), "token_dim": self.token_dim,
                "attn_dim": self.attn_dim}

    @classmethod
    def from_dict(cls, d: dict) -> "ConditioningConfig":
        d = dict(d)
        sa = SetAbstractionConfig(**d.pop("set_abstraction", {}))
        return cls(set_abstraction=sa, **d)


class Conditioner:
    """Separate object and part encoders plus the cross-attention block.

    Weights are seeded and frozen; nothing here is trained.
    """

    def __init__(self, cfg: ConditioningConfig | None = None, seed: int = 0):
        self.cfg = cfg or ConditioningConfig()
        gen = torch.random.fork_rng(devices=[])
        with gen:
            torch.manual_seed(seed)
            self.object_encoder = SetAbstractionEncoder(self.cfg.set_abstraction)
            self.part_encoder = SetAbstractionEncoder(self.cfg.set_abstraction)
            self.attention = CrossAttention(self.cfg.token_dim, self.cfg.attn_dim)
        for m in self.modules().values():
            m.eval()
            m.requires_grad_(False)

    def modules(self) -> dict[str, torch.nn.Module]:
        return {"object_encoder": self.object_encoder, "part_encoder": self.part_encoder,
                "attention": self.attention}

    def encode_object(self, pc: PointCloud) -> np.ndarray:
        return encode_pointcloud(pc, self.cfg.set_abstraction, self.object_encoder)

    def encode_part(self, pc: PointCloud) -> np.ndarray:
        return encode_pointcloud(pc, self.cfg.set_abstraction, self.part_encoder)

    def condition(self, f_obj: np.ndarray, part_pc: PointCloud, f_cat: TokenFeatures,
                  f_part_text: TokenFeatures) -> np.ndarray:
        fused = cross_attention(f_cat, f_part_text, self.attention)
        return build_condition(f_obj, self.encode_part(part_pc), fused,
                               self.cfg.set_abstraction.out_dim, self.cfg.attn_dim)
