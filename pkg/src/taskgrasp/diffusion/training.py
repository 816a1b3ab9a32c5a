"""Minibatch training of a denoiser on (grasp, condition) pairs."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..archive import load_archive, load_module_arrays, module_arrays, save_archive
from ..errors import ConfigError, NumericalDivergenceError, PreconditionError
from .denoisers import build_denoiser
from .process import training_loss
from .schedule import NoiseSchedule, make_schedule

log = logging.getLogger(__name__)

FULL_SCALE_EPOCHS = 1000


@dataclass
class TrainConfig:
    # diffusion hyperparameters, named after the published settings table
    diffusion_steps: int = 100
    beta_schedule: str = "linear"
    beta_start: float = 1e-4
    beta_end: float = 1e-2
    time_embedding: str = "sinusoidal"
    transformer_heads: int = 8
    transformer_hidden_dim: int = 64
    transformer_dropout: float = 0.1
    ffn_hidden_dim: int = 128
    # optimisation
    learning_rate: float = 1e-4
    batch_size: int = 64
    epochs: int = 100  # desk-scale; full-scale runs use FULL_SCALE_EPOCHS
    seed: int = 0
    # network
    architecture: str = "mlp"
    mlp_hidden: int = 256
    time_embed_dim: int = 128
    # bookkeeping
    checkpoint_every: int = 0
    checkpoint_dir: str | None = None
    max_seconds: float | None = None

    def __post_init__(self):
        if self.beta_schedule != "linear":
            raise ConfigError(f"only the linear beta schedule is supported, got {self.beta_schedule!r}")
        if self.time_embedding != "sinusoidal":
            raise ConfigError(f"only sinusoidal time embedding is supported, got {self.time_embedding!r}")
        if self.batch_size < 1 or self.epochs < 0 or self.learning_rate <= 0:
            raise ConfigError("batch_size >= 1, epochs >= 0 and learning_rate > 0 required")

    def schedule(self) -> NoiseSchedule:
        return make_schedule(self.diffusion_steps, self.beta_start, self.beta_end)

    def build_denoiser(self, cond_dim: int) -> nn.Module:
        return build_denoiser(self.architecture, cond_dim, mlp_hidden=self.mlp_hidden,
                              time_embed_dim=self.time_embed_dim, transformer_heads=self.transformer_heads,
                              transformer_hidden_dim=self.transformer_hidden_dim,
                              transformer_dropout=self.transformer_dropout, ffn_hidden_dim=self.ffn_hidden_dim)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown training config keys: {sorted(unknown)}")
        return cls(**d)


def config_hash(d: dict) -> str:
    return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class TrainResult:
    denoiser: nn.Module
    schedule: NoiseSchedule
    epoch_losses: list[float] = field(default_factory=list)
    steps: int = 0
    seconds: float = 0.0


def train(dataset: Sequence[tuple[np.ndarray, np.ndarray]], cfg: TrainConfig | None = None,
          denoiser: nn.Module | None = None, dtype: torch.dtype = torch.float32) -> TrainResult:
    """Adam on the L1 noise loss with ``t`` drawn uniformly from ``1..T``."""
    cfg = cfg or TrainConfig()
    if not dataset:
        raise PreconditionError("training needs a non-empty dataset")
    g0 = torch.as_tensor(np.stack([np.asarray(item[0], dtype=np.float64) for item in dataset]), dtype=dtype)
    cond = torch.as_tensor(np.stack([np.asarray(item[1], dtype=np.float64) for item in dataset]), dtype=dtype)
    sched = cfg.schedule()
    gen = torch.Generator().manual_seed(cfg.seed)
    if denoiser is None:
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(cfg.seed)
            denoiser = cfg.build_denoiser(cond.shape[1]).to(dtype)
    result = TrainResult(denoiser, sched)
    if cfg.epochs == 0:
        return result
    opt = torch.optim.Adam(denoiser.parameters(), lr=cfg.learning_rate)
    n = len(g0)
    start = time.monotonic()
    denoiser.train()
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(cfg.seed)  # dropout masks
        for epoch in range(cfg.epochs):
            perm = torch.randperm(n, generator=gen)
            total, count = 0.0, 0
            for s in range(0, n, cfg.batch_size):
                idx = perm[s:s + cfg.batch_size]
                t = torch.randint(1, sched.T + 1, (len(idx),), generator=gen)
                eps = torch.randn((len(idx), g0.shape[1]), generator=gen, dtype=dtype)
                loss = training_loss(denoiser, g0[idx], t, cond[idx], eps, sched)
                if not torch.isfinite(loss):
                    raise NumericalDivergenceError(
                        f"non-finite loss at epoch {epoch}, step {result.steps}", step=result.steps)
                opt.zero_grad()
                loss.backward()
                opt.step()
                result.steps += 1
                total += loss.item() * len(idx)
                count += len(idx)
            result.epoch_losses.append(total / count)
            if cfg.checkpoint_every and cfg.checkpoint_dir and (epoch + 1) % cfg.checkpoint_every == 0:
                path = Path(cfg.checkpoint_dir) / f"denoiser_epoch{epoch + 1:05d}.npz"
                path.parent.mkdir(parents=True, exist_ok=True)
                save_denoiser(path, denoiser, cfg)
            if epoch % 10 == 0:
                log.info("epoch %d loss %.4f", epoch, result.epoch_losses[-1])
            if cfg.max_seconds is not None and time.monotonic() - start > cfg.max_seconds:
                log.info("time budget reached after %d epochs", epoch + 1)
                break
    denoiser.eval()
    result.seconds = time.monotonic() - start
    return result


def save_denoiser(path, denoiser: nn.Module, cfg: TrainConfig, extra: dict[str, nn.Module] | None = None,
                  meta: dict | None = None) -> None:
    arrays = module_arrays(denoiser, "denoiser")
    for name, mod in (extra or {}).items():
        arrays.update(module_arrays(mod, name))
    sched = cfg.schedule()
    body = {"train_config": cfg.to_dict(), "cond_dim": denoiser.cond_dim, "schedule": sched.to_dict()}
    body.update(meta or {})
    body["config_hash"] = config_hash(body)
    save_archive(path, arrays, body)


def load_denoiser(path, dtype: torch.dtype = torch.float32) -> tuple[nn.Module, TrainConfig, dict, dict]:
    """Returns (denoiser, train config, raw arrays, metadata)."""
    arrays, meta = load_archive(path)
    cfg = TrainConfig.from_dict(meta["train_config"])
    den = cfg.build_denoiser(int(meta["cond_dim"])).to(dtype)
    load_module_arrays(den, arrays, "denoiser")
    den.eval()
    return den, cfg, arrays, meta

