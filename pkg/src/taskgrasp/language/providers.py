"""Completion providers: an offline deterministic stub and a JSON-over-HTTP client."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from typing import Protocol, runtime_checkable

import numpy as np
import requests

from ..errors import ProviderError
from . import canned
from .prompts import PromptKind, parse_prompt

log = logging.getLogger(__name__)


@runtime_checkable
class DescriptionProvider(Protocol):
    provider_id: str

    def complete(self, prompt: str, n: int) -> list[str]:
        """Return ``n`` completions of ``prompt``."""
        ...


def _stable_int(*parts) -> int:
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _norm(name: str) -> str:
    return re.sub(r"\s+", "_", name.strip().lower())


class StubProvider:
    """Offline provider returning canned or seeded synthetic responses.

    Completion ``i`` of a description prompt is the base text with its
    sentences rotated by ``i``, so the ``n`` completions differ but stay
    reproducible. ``calls`` counts invocations of :meth:`complete`.

    ``part_labels`` and ``texts`` extend or override the canned tables;
    ``texts`` is keyed by ``(category, PromptKind, task_or_part_label)``.
    """

    def __init__(self, seed: int = 0, part_labels: dict | None = None, texts: dict | None = None):
        self.seed = seed
        self.provider_id = f"stub-{seed}"
        self.part_labels = {_norm(k): (list(v[0]), list(v[1])) for k, v in canned.PART_LABELS.items()}
        for k, v in (part_labels or {}).items():
            self.part_labels[_norm(k)] = (list(v[0]), list(v[1]))
        self.texts = {}
        for (c, t), s in canned.CATEGORY_TASK.items():
            self.texts[(_norm(c), PromptKind.CATEGORY_TASK, t.lower())] = s
        for (c, p), s in canned.PART_DESCRIPTION.items():
            self.texts[(_norm(c), PromptKind.PART_DESCRIPTION, p.lower())] = s
        for (c, kind, k), s in (texts or {}).items():
            self.texts[(_norm(c), PromptKind(kind), k.lower())] = s
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str, n: int) -> list[str]:
        with self._lock:
            self.calls += 1
        kind, fields = parse_prompt(prompt)
        category = _norm(fields["category"])
        if kind is PromptKind.PART_LABELS:
            return [self._labels_json(category)] * n
        key = fields.get("task") or fields.get("part_label")
        base = self.texts.get((category, kind, key.lower())) or self._synthetic(kind, category, key)
        return [_rotate_sentences(base, i) for i in range(n)]

    def _labels_json(self, category: str) -> str:
        if category in self.part_labels:
            s1, s2 = self.part_labels[category]
        else:
            rng = np.random.default_rng(_stable_int(self.seed, "labels", category))
            picks = [canned.GENERIC_PARTS[i] for i in rng.permutation(len(canned.GENERIC_PARTS))[:4]]
            s1, s2 = picks[:2], picks[2:]
        return json.dumps({"scale_1": s1, "scale_2": s2})

    def _synthetic(self, kind: PromptKind, category: str, key: str) -> str:
        rng = np.random.default_rng(_stable_int(self.seed, kind.value, category, key))
        shape = canned.SYNTH_SHAPES[rng.integers(len(canned.SYNTH_SHAPES))]
        grip = canned.SYNTH_GRIPS[rng.integers(len(canned.SYNTH_GRIPS))]
        role = canned.SYNTH_ROLES[rng.integers(len(canned.SYNTH_ROLES))]
        name = category.replace("_", " ")
        if kind is PromptKind.CATEGORY_TASK:
            return (f"To {key} the {name}, reach for its most {shape} region. "
                    f"The hand should {grip} that region. "
                    f"Holding it this way {role}.")
        return (f"The {key} of the {name} is a {shape} part. "
                f"A hand typically interacts with it to {grip} it. "
                f"During interaction the {key} {role}.")


def _rotate_sentences(text: str, i: int) -> str:
    sentences = [s for s in re.split(r"(?<=[.!?])\s+", text.strip()) if s]
    if len(sentences) < 2 or i == 0:
        return text
    k = i % len(sentences)
    return " ".join(sentences[k:] + sentences[:k])


class HttpProvider:
    """POSTs ``{"prompt": ..., "n": ...}`` and expects ``{"texts": [...]}`` back.

    Endpoint and key default to the ``LLM_ENDPOINT`` and ``LLM_API_KEY``
    environment variables. Failed requests are retried with exponential
    backoff.
    """

    def __init__(self, endpoint: str | None = None, api_key: str | None = None, timeout: float = 60.0,
                 retries: int = 3, backoff: float = 1.0, session: requests.Session | None = None):
        self.endpoint = endpoint or os.environ.get("LLM_ENDPOINT")
        if not self.endpoint:
            raise ProviderError("no endpoint configured (set LLM_ENDPOINT)")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.provider_id = f"http:{self.endpoint}"

    def complete(self, prompt: str, n: int) -> list[str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last: BaseException | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(self.endpoint, json={"prompt": prompt, "n": n},
                                         headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                texts = resp.json()["texts"]
                if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
                    raise ValueError("'texts' must be a list of strings")
                return texts
            except (requests.RequestException, ValueError, KeyError) as exc:
                log.warning("provider request failed (attempt %d/%d): %s", attempt + 1, self.retries + 1, exc)
                last = exc
        raise ProviderError(f"{self.endpoint}: all {self.retries + 1} attempts failed", cause=last)
