"""
Diversity filtering of trajectory candidates.
"""
from typing import List

import numpy as np

from motion_search_sdk.models.trajectory import TrajectoryCandidate

DEFAULT_MIN_DIVERSITY = 0.05


def candidate_distance(a: TrajectoryCandidate, b: TrajectoryCandidate) -> float:
    """
    Distance between two candidates of the same sub-instruction

    Per shared object: the RMS over frames of the center distance. The
    result averages that over objects, so it does not grow with frame count.
    """
    shared = [object_id for object_id in a.object_ids() if object_id in b.object_ids()]
    if not shared:
        return float("inf")
    per_object = []
    for object_id in shared:
        ca, cb = a.centers(object_id), b.centers(object_id)
        n = min(len(ca), len(cb))
        squared = np.sum((ca[:n] - cb[:n]) ** 2, axis=1)
        per_object.append(float(np.sqrt(squared.mean())))
    return float(np.mean(per_object))


def diversity_filter(candidates: List[TrajectoryCandidate],
                     min_dist: float = DEFAULT_MIN_DIVERSITY) -> List[TrajectoryCandidate]:
    """
    Keep candidates that are at least ``min_dist`` from every kept one

    Candidates are visited in order, so on a conflict the earlier one stays.
    """
    kept: List[TrajectoryCandidate] = []
    for candidate in candidates:
        if all(candidate_distance(candidate, other) >= min_dist for other in kept):
            kept.append(candidate)
    return kept
