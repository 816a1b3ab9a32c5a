"""Named-tensor archives (``.npz``) with recorded shapes and a JSON metadata blob."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .errors import ShapeError

_META = "__meta__"
_SHAPES = "__shapes__"


def save_archive(path: str | Path, arrays: dict[str, np.ndarray], meta: dict | None = None) -> None:
    arrays = {k: np.asarray(v) for k, v in arrays.items()}
    shapes = {k: list(v.shape) for k, v in arrays.items()}
    payload = dict(arrays)
    payload[_META] = np.array(json.dumps(meta or {}, sort_keys=True))
    payload[_SHAPES] = np.array(json.dumps(shapes, sort_keys=True))
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def load_archive(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data[_META]))
        shapes = json.loads(str(data[_SHAPES]))
        arrays = {k: data[k] for k in data.files if k not in (_META, _SHAPES)}
    for name, shape in shapes.items():
        if name not in arrays or list(arrays[name].shape) != shape:
            raise ShapeError(f"archive entry {name!r} missing or not of shape {shape}")
    return arrays, meta


def module_arrays(module: torch.nn.Module, prefix: str) -> dict[str, np.ndarray]:
    return {f"{prefix}.{k}": v.detach().cpu().numpy() for k, v in module.state_dict().items()}


def load_module_arrays(module: torch.nn.Module, arrays: dict[str, np.ndarray], prefix: str) -> None:
    own = module.state_dict()
    state = {}
    for k, v in own.items():
        key = f"{prefix}.{k}"
        if key not in arrays:
            raise ShapeError(f"archive has no tensor {key!r}")
        if tuple(arrays[key].shape) != tuple(v.shape):
            raise ShapeError(f"{key}: archive shape {arrays[key].shape} != module shape {tuple(v.shape)}")
        state[k] = torch.as_tensor(arrays[key], dtype=v.dtype)
    module.load_state_dict(state)
