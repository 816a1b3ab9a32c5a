from .hand import HAND_POINTS, HandModel, StubHandModel, fibonacci_sphere, stub_hand_surface
from .pairs import TrainingPair, assign_part, build_training_pairs
from .run import STAGES, GraspPipeline, GraspResult, PipelineConfig, TaskRequest, derive_seed
from .segment import (GroundTruthSegmenter, KMeansSegmenter, Segmenter, read_segments, segment_from_dict,
                      segment_to_dict, stub_segment, write_segment)
from .synthetic import (SyntheticObject, generate_synthetic_dataset, load_dataset, synthetic_dumbbell,
                        write_dataset)

__all__ = [
    "HAND_POINTS", "STAGES", "GraspPipeline", "GraspResult", "GroundTruthSegmenter", "HandModel",
    "KMeansSegmenter", "PipelineConfig", "Segmenter", "StubHandModel", "SyntheticObject", "TaskRequest",
    "TrainingPair", "assign_part", "build_training_pairs", "derive_seed", "fibonacci_sphere",
    "generate_synthetic_dataset", "load_dataset", "read_segments", "segment_from_dict", "segment_to_dict",
    "stub_hand_surface", "stub_segment", "synthetic_dumbbell", "write_dataset", "write_segment",
]
