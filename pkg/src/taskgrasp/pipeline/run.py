"""End-to-end orchestration: descriptions, part labels, segmentation, filtering,
per-part conditional sampling and contact-based selection."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..archive import load_module_arrays
from ..conditioning import Conditioner, ConditioningConfig
from ..diffusion import TrainConfig, config_hash, load_denoiser, sample, save_denoiser
from ..errors import ConfigError, NoValidPartsError, StageError
from ..geometry import (DEFAULT_CONTACT_THRESHOLD, DEFAULT_MIN_PART_POINTS, GraspCandidate, PartSegment,
                        PointCloud, contact_score, filter_valid_parts, select_best)
from ..language import (DEFAULT_NUM_DESCRIPTIONS, PROMPT_VERSION, DescriptionBundle, DescriptionCache,
                        DescriptionProvider, HashTextEncoder, PromptKind, StubProvider, TextEncoder,
                        encode_text, generate_description, generate_part_labels, render_prompt)
from .hand import HandModel, StubHandModel
from .segment import KMeansSegmenter, Segmenter

log = logging.getLogger(__name__)

STAGES = ("descriptions", "labels", "segmentation", "filtering", "sampling", "selection")


def derive_seed(*parts) -> int:
    """63-bit seed from a master seed and any keys (e.g. a part label)."""
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


@dataclass
class PipelineConfig:
    contact_threshold: float = DEFAULT_CONTACT_THRESHOLD
    min_part_points: int = DEFAULT_MIN_PART_POINTS
    num_descriptions: int = DEFAULT_NUM_DESCRIPTIONS
    samples_per_part: int = 1
    workers: int = 1
    model_seed: int = 0
    text_dim: int = 768
    max_text_len: int = 200
    conditioning: ConditioningConfig = field(default_factory=ConditioningConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.samples_per_part < 1 or self.workers < 1 or self.num_descriptions < 1:
            raise ConfigError("samples_per_part, workers and num_descriptions must be >= 1")
        if self.conditioning.token_dim != self.text_dim:
            raise ConfigError("conditioning.token_dim must equal text_dim")

    def to_dict(self) -> dict:
        return {
            "contact_threshold": self.contact_threshold, "min_part_points": self.min_part_points,
            "num_descriptions": self.num_descriptions, "samples_per_part": self.samples_per_part,
            "workers": self.workers, "model_seed": self.model_seed, "text_dim": self.text_dim,
            "max_text_len": self.max_text_len, "conditioning": self.conditioning.to_dict(),
            "train": self.train.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        cond = ConditioningConfig.from_dict(d.pop("conditioning", {}))
        tr = TrainConfig.from_dict(d.pop("train", {}))
        return cls(conditioning=cond, train=tr, **d)

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        return cls() if path is None else cls.from_dict(json.loads(Path(path).read_text()))

    def hash(self) -> str:
        d = self.to_dict()
        d.pop("workers")  # does not affect results
        return config_hash(d)


@dataclass
class TaskRequest:
    object_cloud: PointCloud
    category: str
    task: str
    seed: int = 0
    object_path: str | None = None

    def __post_init__(self):
        if not self.category.strip() or not self.task.strip():
            raise ConfigError("category and task must be non-empty")
        if len(self.object_cloud) == 0:
            raise ConfigError("object cloud is empty")


@dataclass
class GraspResult:
    request: TaskRequest
    selected: GraspCandidate
    all_candidates: list[GraspCandidate]
    descriptions: DescriptionBundle
    timings: dict[str, float]
    config_hash: str = ""

    def to_dict(self) -> dict:
        req = {"category": self.request.category, "task": self.request.task, "seed": self.request.seed}
        if self.request.object_path is not None:
            req["object"] = self.request.object_path
        return {
            "request": req,
            "selected": _candidate_dict(self.selected),
            "candidates": [_candidate_dict(c) for c in self.all_candidates],
            "versions": {"config_hash": self.config_hash, "prompt_version": PROMPT_VERSION},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def _candidate_dict(c: GraspCandidate) -> dict:
    return {"part_label": c.part.label, "score": float(c.score), "grasp": [float(v) for v in c.grasp]}


class GraspPipeline:
    def __init__(self, provider: DescriptionProvider | None = None, segmenter: Segmenter | None = None,
                 hand_model: HandModel | None = None, config: PipelineConfig | None = None,
                 conditioner: Conditioner | None = None, denoiser: torch.nn.Module | None = None,
                 text_encoder: TextEncoder | None = None, cache: DescriptionCache | None = None):
        self.config = config or PipelineConfig()
        cfg = self.config
        self.provider = provider or StubProvider()
        self.segmenter = segmenter or KMeansSegmenter()
        self.hand_model = hand_model or StubHandModel()
        self.text_encoder = text_encoder or HashTextEncoder(cfg.text_dim, cfg.max_text_len, seed=cfg.model_seed)
        self.conditioner = conditioner or Conditioner(cfg.conditioning, seed=cfg.model_seed)
        if denoiser is None:
            with torch.random.fork_rng(devices=[]):
                torch.manual_seed(cfg.model_seed)
                denoiser = cfg.train.build_denoiser(cfg.conditioning.cond_dim)
            denoiser.eval()
        self.denoiser = denoiser
        self.schedule = cfg.train.schedule()
        self.cache = cache

    # -- descriptions ------------------------------------------------------------------------

    def category_description(self, category: str, task: str, seed: int) -> str:
        prompt = render_prompt(PromptKind.CATEGORY_TASK, category, task=task)
        return generate_description(self.provider, prompt, self.config.num_descriptions,
                                    derive_seed(seed, "category"), self.cache)

    def part_description(self, category: str, label: str, seed: int) -> str:
        prompt = render_prompt(PromptKind.PART_DESCRIPTION, category, part_label=label)
        return generate_description(self.provider, prompt, self.config.num_descriptions,
                                    derive_seed(seed, "part", label), self.cache)

    def part_condition(self, f_obj, part_cloud: PointCloud, f_cat, part_text: str) -> np.ndarray:
        return self.conditioner.condition(f_obj, part_cloud, f_cat, encode_text(self.text_encoder, part_text))

    # -- inference ---------------------------------------------------------------------------

    def run(self, request: TaskRequest, out: str | Path | None = None) -> GraspResult:
        cfg = self.config
        timings: dict[str, float] = {}
        cloud = request.object_cloud

        def stage(name, fn):
            start = time.perf_counter()
            try:
                return fn()
            except NoValidPartsError:
                raise
            except Exception as exc:
                raise StageError(name, exc) from exc
            finally:
                timings[name] = time.perf_counter() - start

        cat_text = stage("descriptions", lambda: self.category_description(request.category, request.task,
                                                                            request.seed))
        labels = stage("labels", lambda: generate_part_labels(self.provider, request.category))
        segments = stage("segmentation", lambda: self.segmenter.segment(cloud, labels))
        valid = stage("filtering", lambda: filter_valid_parts(segments, cfg.min_part_points))
        if not valid:
            raise NoValidPartsError(f"no part has >= {cfg.min_part_points} points")
        bundle = DescriptionBundle(cat_text, {}, list(labels), self.provider.provider_id, request.seed)

        def per_part(seg: PartSegment):
            text = self.part_description(request.category, seg.label, request.seed)
            part_cloud = seg.cloud(cloud)
            cond = self.part_condition(f_obj, part_cloud, f_cat, text)
            seed = derive_seed(request.seed, "sample", seg.label)
            batch = np.repeat(cond[None], cfg.samples_per_part, axis=0)
            grasps = sample(self.denoiser, batch, self.schedule, seed)
            cands = [GraspCandidate(seg, g, contact_score(part_cloud, self.hand_model.surface(g),
                                                          cfg.contact_threshold)) for g in grasps]
            return text, cands

        def sampling():
            nonlocal f_obj, f_cat
            f_obj = self.conditioner.encode_object(cloud)
            f_cat = encode_text(self.text_encoder, cat_text)
            if cfg.workers > 1:
                with ThreadPoolExecutor(cfg.workers) as pool:
                    return list(pool.map(per_part, valid))
            return [per_part(seg) for seg in valid]

        f_obj = f_cat = None
        outputs = stage("sampling", sampling)
        candidates = []
        for seg, (text, cands) in zip(valid, outputs):
            bundle.part_texts[seg.label] = text
            candidates.extend(cands)
        selected = stage("selection", lambda: select_best(candidates))
        result = GraspResult(request, selected, candidates, bundle, timings, cfg.hash())
        if out is not None:
            result.write(out)
        return result

    # -- persistence -------------------------------------------------------------------------

    def save(self, path: str | Path, meta: dict | None = None) -> None:
        body = {"pipeline_config": self.config.to_dict()}
        body.update(meta or {})
        save_denoiser(path, self.denoiser, self.config.train, self.conditioner.modules(), body)

    @classmethod
    def load(cls, path: str | Path, **kwargs) -> "GraspPipeline":
        denoiser, _, arrays, meta = load_denoiser(path)
        config = PipelineConfig.from_dict(meta["pipeline_config"])
        conditioner = Conditioner(config.conditioning, seed=config.model_seed)
        for name, mod in conditioner.modules().items():
            load_module_arrays(mod, arrays, name)
        return cls(config=config, conditioner=conditioner, denoiser=denoiser, **kwargs)


def result_from_json(text: str) -> dict:
    return json.loads(text)
