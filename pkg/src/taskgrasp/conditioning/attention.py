"""Category-to-part cross-attention over token features."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..errors import AttentionError, ShapeError
from ..language.encoder import TokenFeatures

DEFAULT_ATTN_DIM = 128


@dataclass(frozen=True)
class FusedFeature:
    matrix: np.ndarray     # T_cat x d_attn
    pooled: np.ndarray     # d_attn, mean of matrix rows over the category mask
    attention: np.ndarray  # T_cat x T_part, row-stochastic


class CrossAttention(nn.Module):
    """Queries come from the category text, keys and values from the part text."""

    def __init__(self, token_dim: int = 768, attn_dim: int = DEFAULT_ATTN_DIM):
        super().__init__()
        self.token_dim = token_dim
        self.attn_dim = attn_dim
        self.q = nn.Linear(token_dim, attn_dim)
        self.k = nn.Linear(token_dim, attn_dim)
        self.v = nn.Linear(token_dim, attn_dim)

    def forward(self, cat: torch.Tensor, cat_mask: torch.Tensor, part: torch.Tensor, part_mask: torch.Tensor):
        q, k, v = self.q(cat), self.k(part), self.v(part)
        logits = q @ k.transpose(-1, -2) / math.sqrt(self.attn_dim)
        logits = logits.masked_fill(~part_mask[..., None, :], float("-inf"))
        attn = torch.softmax(logits, dim=-1)
        out = attn @ v
        w = cat_mask.to(out.dtype)[..., None]
        pooled = (out * w).sum(dim=-2) / w.sum(dim=-2)
        return out, pooled, attn


def cross_attention(f_cat: TokenFeatures, f_part: TokenFeatures, weights: CrossAttention) -> FusedFeature:
    if f_cat.dim != weights.token_dim or f_part.dim != weights.token_dim:
        raise ShapeError(f"token features must be {weights.token_dim}-dimensional")
    if not f_part.mask.any():
        raise AttentionError("every part token is masked")
    if not f_cat.mask.any():
        raise AttentionError("every category token is masked")
    dtype = next(weights.parameters()).dtype
    with torch.no_grad():
        out, pooled, attn = weights(
            torch.as_tensor(f_cat.matrix, dtype=dtype), torch.as_tensor(f_cat.mask),
            torch.as_tensor(f_part.matrix, dtype=dtype), torch.as_tensor(f_part.mask),
        )
    return FusedFeature(out.numpy().astype(np.float64), pooled.numpy().astype(np.float64),
                        attn.numpy().astype(np.float64))
