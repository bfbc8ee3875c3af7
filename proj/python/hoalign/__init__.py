"""Pose-grid alignment of object meshes to observed point clouds.

Arrays are NumPy float64: point sets are (N, 3), rotations are [w, x, y, z].
"""

from ._core import (
    Error,
    brute_force_decode,
    chamfer_distance,
    covering_radius,
    estimate_scale,
    f_score,
    icp_with_scaling,
    normalize_points,
    rasterize_silhouette,
    rodrigues_error,
    rotation_grid,
    sample_hand_points,
    synth,
    track,
    viterbi_decode,
)

__all__ = [
    "Error",
    "brute_force_decode",
    "chamfer_distance",
    "covering_radius",
    "estimate_scale",
    "f_score",
    "icp_with_scaling",
    "normalize_points",
    "rasterize_silhouette",
    "rodrigues_error",
    "rotation_grid",
    "sample_hand_points",
    "synth",
    "track",
    "viterbi_decode",
]
