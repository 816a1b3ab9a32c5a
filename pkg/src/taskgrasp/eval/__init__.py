from .metrics import (
    DEFAULT_VOXEL,
    FRECHET_LABEL,
    MetricReport,
    VoxelGrid,
    contact_ratio,
    diversity,
    filled_occupancy,
    frechet_distance,
    frechet_feature_distance,
    gaussian_stats,
    penetration_depth,
    penetration_volume,
)
from .report import EvalSample, build_report, load_result_samples, write_report_csv
from .robustness import RobustnessPoint, boundary_points, corrupt_segments, selection_robustness_curve

__all__ = [
    "DEFAULT_VOXEL", "EvalSample", "FRECHET_LABEL", "MetricReport", "RobustnessPoint", "VoxelGrid", "boundary_points",
    "contact_ratio", "corrupt_segments", "diversity", "filled_occupancy", "frechet_distance",
    "frechet_feature_distance", "gaussian_stats", "penetration_depth", "penetration_volume",
    "build_report", "load_result_samples", "selection_robustness_curve", "write_report_csv",
]
