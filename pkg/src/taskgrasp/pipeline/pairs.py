"""Pairing ground-truth grasps with the part they touch, and building conditions for them."""
from __future__ import annotations

import logging
from typing import NamedTuple, Sequence

import numpy as np

from ..geometry import GraspCandidate, PartSegment, contact_score, filter_valid_parts, select_best
from .hand import HandModel
from .run import GraspPipeline
from .synthetic import SyntheticObject

log = logging.getLogger(__name__)


class TrainingPair(NamedTuple):
    grasp: np.ndarray
    condition: np.ndarray
    part_label: str
    object_id: str


def assign_part(grasp: np.ndarray, object_cloud, segments: Sequence[PartSegment], hand_model: HandModel,
                lam: float) -> GraspCandidate | None:
    """The segment with the highest contact score against the grasp's hand, or None if nothing is touched."""
    if not segments:
        return None
    hand = hand_model.surface(grasp)
    cands = [GraspCandidate(seg, grasp, contact_score(seg.cloud(object_cloud), hand, lam)) for seg in segments]
    best = select_best(cands)
    return best if best.score > 0 else None


def build_training_pairs(objects: Sequence[SyntheticObject], hand_model: HandModel,
                         pipeline: GraspPipeline, seed: int = 0) -> list[TrainingPair]:
    """One (grasp, condition) pair per ground-truth grasp that touches a valid part.

    Descriptions are drawn once, with ``seed``; call again with another seed to
    resample them (e.g. per epoch).
    """
    cfg = pipeline.config
    pairs = []
    for obj in objects:
        valid = filter_valid_parts([PartSegment(s.label, s.scale_level, s.point_indices) for s in obj.segments],
                                   cfg.min_part_points)
        f_obj = None
        part_cache: dict[str, np.ndarray] = {}
        for g, _intended, task in obj.grasps:
            best = assign_part(g, obj.cloud, valid, hand_model, cfg.contact_threshold)
            if best is None:
                log.warning("%s: grasp touches no valid part, dropped", obj.object_id)
                continue
            if f_obj is None:
                f_obj = pipeline.conditioner.encode_object(obj.cloud)
            key = f"{task}\x1f{best.part.label}"
            if key not in part_cache:
                f_cat = pipeline.text_encoder.encode(pipeline.category_description(obj.category, task, seed))
                text = pipeline.part_description(obj.category, best.part.label, seed)
                part_cache[key] = pipeline.part_condition(f_obj, best.part.cloud(obj.cloud), f_cat, text)
            pairs.append(TrainingPair(np.asarray(g, dtype=np.float64), part_cache[key], best.part.label,
                                      obj.object_id))
    return pairs
