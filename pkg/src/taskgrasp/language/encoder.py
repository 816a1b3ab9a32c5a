"""Token-feature encoders.

``HashTextEncoder`` is a test-only stand-in for a pretrained language model:
each token is mapped to a fixed pseudo-random vector derived from a hash of
the token. The features carry no meaning beyond token identity.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

import numpy as np

from ..errors import PreconditionError

DEFAULT_MAX_LEN = 200
DEFAULT_TOKEN_DIM = 768

_TOKEN_RE = re.compile(r"[a-z0-9]+|[^\sa-z0-9]")


@dataclass(frozen=True)
class TokenFeatures:
    """``matrix`` is max_len x D; rows where ``mask`` is False are zero."""

    matrix: np.ndarray
    mask: np.ndarray

    @property
    def num_tokens(self) -> int:
        return int(self.mask.sum())

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


class TextEncoder(Protocol):
    dim: int
    max_len: int

    def encode(self, text: str) -> TokenFeatures: ...


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class HashTextEncoder:
    def __init__(self, dim: int = DEFAULT_TOKEN_DIM, max_len: int = DEFAULT_MAX_LEN, seed: int = 0):
        self.dim = dim
        self.max_len = max_len
        self.seed = seed
        self._vector = lru_cache(maxsize=8192)(self._token_vector)

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(f"{self.seed}\x1f{token}".encode(), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.standard_normal(self.dim) / np.sqrt(self.dim)

    def encode(self, text: str) -> TokenFeatures:
        tokens = tokenize(text)[: self.max_len]
        if not tokens:
            raise PreconditionError("text has no tokens")
        matrix = np.zeros((self.max_len, self.dim))
        for i, tok in enumerate(tokens):
            matrix[i] = self._vector(tok)
        mask = np.zeros(self.max_len, dtype=bool)
        mask[: len(tokens)] = True
        return TokenFeatures(matrix, mask)


def encode_text(encoder: TextEncoder, text: str) -> TokenFeatures:
    if not text or not text.strip():
        raise PreconditionError("text must be non-empty")
    return encoder.encode(text)
