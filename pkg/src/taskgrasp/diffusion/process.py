"""Forward noising, the L1 noise-prediction loss and ancestral sampling."""
from __future__ import annotations

from typing import Callable

import numpy as np
import torch

from ..errors import NumericalDivergenceError, PreconditionError, ShapeError
from .denoisers import GRASP_DIM
from .schedule import NoiseSchedule

Denoiser = Callable[[torch.Tensor, torch.Tensor, torch.Tensor], torch.Tensor]


def _check_t(t, T: int) -> None:
    tt = np.asarray(t)
    if tt.size == 0 or tt.min() < 1 or tt.max() > T:
        raise IndexError(f"diffusion step out of range [1, {T}]: {t}")


def _coef(values: np.ndarray, t, like):
    """Gather ``values[t - 1]`` shaped to broadcast against the leading dim of ``like``."""
    idx = np.asarray(t.cpu() if isinstance(t, torch.Tensor) else t) - 1
    c = values[idx]
    if isinstance(like, torch.Tensor):
        c = torch.as_tensor(c, dtype=like.dtype)
        return c[..., None] if c.ndim else c
    return c[..., None] if np.ndim(c) else c


def q_sample(g0, t, eps, sched: NoiseSchedule):
    """``sqrt(abar_t) * g0 + sqrt(1 - abar_t) * eps`` for tensors or arrays."""
    _check_t(t.cpu().numpy() if isinstance(t, torch.Tensor) else t, sched.T)
    a = _coef(np.sqrt(sched.alpha_bars), t, g0)
    b = _coef(np.sqrt(1.0 - sched.alpha_bars), t, g0)
    return a * g0 + b * eps


def _dtype_of(denoiser) -> torch.dtype:
    if isinstance(denoiser, torch.nn.Module):
        for p in denoiser.parameters():
            return p.dtype
    return torch.float64


def _t_vector(t: int, batch: int) -> torch.Tensor:
    return torch.full((batch,), int(t), dtype=torch.long)


def training_loss(denoiser: Denoiser, g0: torch.Tensor, t, cond: torch.Tensor, eps: torch.Tensor,
                  sched: NoiseSchedule) -> torch.Tensor:
    """Mean absolute error between ``eps`` and the predicted noise."""
    if g0.shape != eps.shape or g0.shape[-1] != GRASP_DIM:
        raise ShapeError(f"g0 and eps must both be (..., {GRASP_DIM}), got {tuple(g0.shape)} / {tuple(eps.shape)}")
    cond_dim = getattr(denoiser, "cond_dim", None)
    if cond_dim is not None and cond.shape[-1] != cond_dim:
        raise ShapeError(f"condition has width {cond.shape[-1]}, denoiser expects {cond_dim}")
    if not isinstance(t, torch.Tensor):
        t = torch.as_tensor(np.broadcast_to(np.asarray(t), g0.shape[:-1]).copy(), dtype=torch.long)
    gt = q_sample(g0, t, eps, sched)
    return (eps - denoiser(gt, t, cond)).abs().mean()


def p_sample_step(denoiser: Denoiser, gt: torch.Tensor, t: int, cond: torch.Tensor, sched: NoiseSchedule,
                  generator: torch.Generator | None = None) -> torch.Tensor:
    """One reverse step with the noise-prediction posterior mean and variance ``beta_t``.

    No noise is added at ``t == 1``.
    """
    _check_t(t, sched.T)
    beta = float(sched.betas[t - 1])
    alpha = float(sched.alphas[t - 1])
    abar = float(sched.alpha_bars[t - 1])
    eps_hat = denoiser(gt, _t_vector(t, gt.shape[0]), cond)
    mean = (gt - (beta / np.sqrt(1.0 - abar)) * eps_hat) / np.sqrt(alpha)
    if t == 1:
        return mean
    z = torch.randn(gt.shape, generator=generator, dtype=gt.dtype)
    return mean + np.sqrt(beta) * z


@torch.no_grad()
def sample(denoiser: Denoiser, cond, sched: NoiseSchedule, seed: int) -> np.ndarray:
    """Run the reverse chain from ``g_T ~ N(0, I)``; batched if ``cond`` is 2-D."""
    dtype = _dtype_of(denoiser)
    cond = torch.as_tensor(np.asarray(cond), dtype=dtype)
    single = cond.ndim == 1
    if single:
        cond = cond[None]
    gen = torch.Generator().manual_seed(int(seed) & 0xFFFF_FFFF_FFFF_FFFF)
    g = torch.randn((cond.shape[0], GRASP_DIM), generator=gen, dtype=dtype)
    was_training = isinstance(denoiser, torch.nn.Module) and denoiser.training
    if was_training:
        denoiser.eval()
    try:
        for t in range(sched.T, 0, -1):
            g = p_sample_step(denoiser, g, t, cond, sched, gen)
            if not torch.isfinite(g).all():
                raise NumericalDivergenceError(f"non-finite grasp parameters at step {t}", step=t)
    finally:
        if was_training:
            denoiser.train()
    out = g.numpy().astype(np.float64)
    return out[0] if single else out


def check_grasp(g) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if g.shape[-1] != GRASP_DIM or not np.all(np.isfinite(g)):
        raise PreconditionError(f"grasp must be a finite {GRASP_DIM}-vector")
    return g
