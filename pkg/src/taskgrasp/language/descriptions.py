"""Description generation with k-sample selection, and part-label parsing."""
from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ParseError, PreconditionError, ProviderError
from .cache import DescriptionCache, prompt_hash
from .prompts import PromptKind, render_prompt
from .providers import DescriptionProvider

log = logging.getLogger(__name__)

DEFAULT_NUM_DESCRIPTIONS = 10
NUM_SCALES = 2


@dataclass
class DescriptionBundle:
    category_text: str
    part_texts: dict[str, str] = field(default_factory=dict)
    part_labels: list[tuple[str, int]] = field(default_factory=list)
    provider: str = ""
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "category_text": self.category_text,
            "part_texts": dict(self.part_texts),
            "part_labels": [[label, level] for label, level in self.part_labels],
            "provenance": {"provider": self.provider, "seed": self.seed},
        }


def generate_description_entry(provider: DescriptionProvider, prompt: str, k: int = DEFAULT_NUM_DESCRIPTIONS,
                               rng_seed: int = 0, cache: DescriptionCache | None = None,
                               retries: int = 0, backoff: float = 0.0) -> dict:
    """Ask for ``k`` completions and pick one uniformly with a seeded RNG.

    Returns the cache entry; a cached entry with the same ``k`` short-circuits
    the provider call.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if cache is not None:
        hit = cache.get(prompt, provider.provider_id, rng_seed)
        if hit is not None and hit.get("k") == k:
            return hit
    last: BaseException | None = None
    for attempt in range(retries + 1):
        if attempt and backoff:
            time.sleep(backoff * 2 ** (attempt - 1))
        try:
            texts = provider.complete(prompt, k)
        except Exception as exc:  # provider implementations raise anything
            log.warning("provider %s failed (attempt %d): %s", provider.provider_id, attempt + 1, exc)
            last = exc
            continue
        if len(texts) != k or not all(isinstance(t, str) and t.strip() for t in texts):
            last = ValueError(f"expected {k} non-empty completions, got {len(texts)}")
            continue
        break
    else:
        raise ProviderError(f"provider {provider.provider_id} failed", cause=last)
    chosen = int(np.random.default_rng(rng_seed).integers(k))
    entry = {
        "prompt_hash": prompt_hash(prompt),
        "provider": provider.provider_id,
        "seed": int(rng_seed),
        "k": k,
        "chosen_index": chosen,
        "texts": list(texts),
    }
    if cache is not None:
        cache.put(prompt, entry)
    return entry


def generate_description(provider: DescriptionProvider, prompt: str, k: int = DEFAULT_NUM_DESCRIPTIONS,
                         rng_seed: int = 0, cache: DescriptionCache | None = None,
                         retries: int = 0, backoff: float = 0.0) -> str:
    entry = generate_description_entry(provider, prompt, k, rng_seed, cache, retries, backoff)
    return entry["texts"][entry["chosen_index"]]


def parse_part_labels(raw: str) -> list[tuple[str, int]]:
    """Parse ``{"scale_1": [...], "scale_2": [...]}`` (possibly wrapped in prose)."""
    match = re.search(r"\{.*\}", raw, re.DOTALL)
    if match is None:
        raise ParseError("no JSON object in part-label response", raw)
    try:
        obj = json.loads(match.group(0))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in part-label response: {exc}", raw) from exc
    if not isinstance(obj, dict):
        raise ParseError("part-label response is not a JSON object", raw)
    levels = {}
    for key, labels in obj.items():
        m = re.fullmatch(r"scale[_ ]?(\d+)", str(key).strip().lower())
        if m is None or not isinstance(labels, list):
            raise ParseError(f"unexpected entry {key!r} in part-label response", raw)
        levels[int(m.group(1))] = labels
    if sorted(levels) != list(range(1, NUM_SCALES + 1)):
        raise ParseError(f"expected scales 1..{NUM_SCALES}, got {sorted(levels)}", raw)
    out: list[tuple[str, int]] = []
    seen = set()
    for level in sorted(levels):
        for label in levels[level]:
            if not isinstance(label, str) or not label.strip():
                raise ParseError(f"bad label {label!r}", raw)
            name = " ".join(label.split())
            if name not in seen:
                seen.add(name)
                out.append((name, level))
    if not out:
        raise ParseError("no part labels in response", raw)
    return out


def generate_part_labels(provider: DescriptionProvider, category: str) -> list[tuple[str, int]]:
    if not category or not category.strip():
        raise PreconditionError("category must be non-empty")
    prompt = render_prompt(PromptKind.PART_LABELS, category)
    try:
        raw = provider.complete(prompt, 1)[0]
    except ProviderError:
        raise
    except Exception as exc:
        raise ProviderError(f"provider {provider.provider_id} failed", cause=exc) from exc
    return parse_part_labels(raw)
