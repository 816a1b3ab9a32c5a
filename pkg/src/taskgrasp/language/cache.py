"""On-disk description cache, one JSON file per (prompt, provider, seed)."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def entry_key(prompt: str, provider_id: str, seed: int) -> str:
    payload = json.dumps([prompt, provider_id, int(seed)], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class DescriptionCache:
    """Entries look like ``{prompt_hash, provider, seed, k, chosen_index, texts}``.

    Writes go through a temp file and ``os.replace`` so concurrent readers
    never observe a partial entry.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def path_for(self, prompt: str, provider_id: str, seed: int) -> Path:
        return self.root / f"{entry_key(prompt, provider_id, seed)}.json"

    def get(self, prompt: str, provider_id: str, seed: int) -> dict | None:
        path = self.path_for(prompt, provider_id, seed)
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None

    def put(self, prompt: str, entry: dict) -> Path:
        path = self.path_for(prompt, entry["provider"], entry["seed"])
        data = json.dumps(entry, ensure_ascii=False, indent=1, sort_keys=True)
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(data)
            os.replace(tmp, path)
        return path

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*.json"))
