"""Noise-prediction networks ``eps(g_t, t, cond)`` over 61-dim grasp vectors."""
from __future__ import annotations

import math

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..errors import ConfigError

GRASP_DIM = 61


def sinusoidal_embedding(t: torch.Tensor, dim: int) -> torch.Tensor:
    """Interleaved ``(sin(t/w_k), cos(t/w_k))`` with ``w_k`` geometric in [1, 1e4]."""
    if dim % 2:
        raise ConfigError(f"time embedding dim must be even, got {dim}")
    half = dim // 2
    k = torch.arange(half, dtype=torch.float64)
    omega = 10000.0 ** (k / max(half - 1, 1))
    angles = t.to(torch.float64)[..., None] / omega
    emb = torch.stack([torch.sin(angles), torch.cos(angles)], dim=-1)
    return emb.reshape(*t.shape, dim)


def time_embedding(t: int, dim: int) -> np.ndarray:
    return sinusoidal_embedding(torch.tensor(float(t)), dim).numpy()


class MLPDenoiser(nn.Module):
    def __init__(self, cond_dim: int, hidden: int = 256, time_embed_dim: int = 128, grasp_dim: int = GRASP_DIM):
        super().__init__()
        if time_embed_dim % 2:
            raise ConfigError("time_embed_dim must be even")
        self.cond_dim = cond_dim
        self.time_embed_dim = time_embed_dim
        self.grasp_dim = grasp_dim
        self.net = nn.Sequential(
            nn.Linear(grasp_dim + time_embed_dim + cond_dim, hidden), nn.SiLU(),
            nn.Linear(hidden, hidden), nn.SiLU(),
            nn.Linear(hidden, grasp_dim),
        )

    def forward(self, g: torch.Tensor, t: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        temb = sinusoidal_embedding(t, self.time_embed_dim).to(g.dtype)
        return self.net(torch.cat([g, temb, cond], dim=-1))


class ResBlock(nn.Module):
    def __init__(self, channels: int, temb_dim: int, dropout: float):
        super().__init__()
        self.norm1 = nn.GroupNorm(8, channels)
        self.conv1 = nn.Conv1d(channels, channels, 3, padding=1)
        self.temb = nn.Linear(temb_dim, channels)
        self.norm2 = nn.GroupNorm(8, channels)
        self.drop = nn.Dropout(dropout)
        self.conv2 = nn.Conv1d(channels, channels, 3, padding=1)

    def forward(self, x, temb):
        h = self.conv1(F.silu(self.norm1(x)))
        h = h + self.temb(temb)[..., None]
        h = self.conv2(self.drop(F.silu(self.norm2(h))))
        return x + h


class SpatialTransformer(nn.Module):
    """Self-attention over the grasp sequence, cross-attention to the condition tokens, feed-forward."""

    def __init__(self, channels: int, heads: int, hidden: int, ff_hidden: int, dropout: float):
        super().__init__()
        self.norm = nn.GroupNorm(8, channels)
        self.proj_in = nn.Linear(channels, hidden)
        self.ln1 = nn.LayerNorm(hidden)
        self.self_attn = nn.MultiheadAttention(hidden, heads, dropout=dropout, batch_first=True)
        self.ln2 = nn.LayerNorm(hidden)
        self.cross_attn = nn.MultiheadAttention(hidden, heads, dropout=dropout, batch_first=True)
        self.ln3 = nn.LayerNorm(hidden)
        self.ff = nn.Sequential(nn.Linear(hidden, ff_hidden), nn.GELU(), nn.Dropout(dropout),
                                nn.Linear(ff_hidden, hidden))
        self.proj_out = nn.Linear(hidden, channels)

    def forward(self, x, context):
        h = self.proj_in(self.norm(x).transpose(1, 2))
        a = self.ln1(h)
        h = h + self.self_attn(a, a, a, need_weights=False)[0]
        a = self.ln2(h)
        h = h + self.cross_attn(a, context, context, need_weights=False)[0]
        h = h + self.ff(self.ln3(h))
        return x + self.proj_out(h).transpose(1, 2)


class UNetDenoiser(nn.Module):
    """Input conv, four (ResBlock, SpatialTransformer) stages, output conv.

    The grasp vector is treated as a one-channel sequence of length 61; the
    condition vector is projected to ``context_tokens`` tokens for cross-attention.
    """

    def __init__(self, cond_dim: int, channels: int = 64, time_embed_dim: int = 128, heads: int = 8,
                 hidden: int = 64, ff_hidden: int = 128, dropout: float = 0.1, num_stages: int = 4,
                 context_tokens: int = 4, grasp_dim: int = GRASP_DIM):
        super().__init__()
        if time_embed_dim % 2:
            raise ConfigError("time_embed_dim must be even")
        self.cond_dim = cond_dim
        self.time_embed_dim = time_embed_dim
        self.grasp_dim = grasp_dim
        self.context_tokens = context_tokens
        self.hidden = hidden
        self.time_mlp = nn.Sequential(nn.Linear(time_embed_dim, time_embed_dim), nn.SiLU(),
                                      nn.Linear(time_embed_dim, time_embed_dim))
        self.context = nn.Linear(cond_dim, context_tokens * hidden)
        self.conv_in = nn.Conv1d(1, channels, 3, padding=1)
        self.res = nn.ModuleList(ResBlock(channels, time_embed_dim, dropout) for _ in range(num_stages))
        self.attn = nn.ModuleList(SpatialTransformer(channels, heads, hidden, ff_hidden, dropout)
                                  for _ in range(num_stages))
        self.norm_out = nn.GroupNorm(8, channels)
        self.conv_out = nn.Conv1d(channels, 1, 3, padding=1)

    def forward(self, g: torch.Tensor, t: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        temb = self.time_mlp(sinusoidal_embedding(t, self.time_embed_dim).to(g.dtype))
        ctx = self.context(cond).reshape(cond.shape[0], self.context_tokens, self.hidden)
        h = self.conv_in(g[:, None, :])
        for res, attn in zip(self.res, self.attn):
            h = attn(res(h, temb), ctx)
        return self.conv_out(F.silu(self.norm_out(h)))[:, 0, :]


def build_denoiser(architecture: str, cond_dim: int, *, mlp_hidden: int = 256, time_embed_dim: int = 128,
                   transformer_heads: int = 8, transformer_hidden_dim: int = 64,
                   transformer_dropout: float = 0.1, ffn_hidden_dim: int = 128) -> nn.Module:
    arch = architecture.lower()
    if arch == "mlp":
        return MLPDenoiser(cond_dim, mlp_hidden, time_embed_dim)
    if arch == "unet":
        return UNetDenoiser(cond_dim, time_embed_dim=time_embed_dim, heads=transformer_heads,
                            hidden=transformer_hidden_dim, ff_hidden=ffn_hidden_dim,
                            dropout=transformer_dropout)
    raise ConfigError(f"unknown denoiser architecture {architecture!r}")


def count_parameters(module: nn.Module) -> int:
    return sum(math.prod(p.shape) for p in module.parameters())
