"""
Deterministic local verifier.

Each law is scored from candidate geometry (and the scene's static mask) with
piecewise-linear bands, so scores are reproducible and testable against
brute-force oracles.
"""
import math
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from motion_search_sdk.models.config import VerifierThresholds
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import GoalSpec, SubInstruction
from motion_search_sdk.models.report import LawScore, SemanticScore, VerificationReport, VerifierWeights
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.utils.logging_setup import get_logger
from motion_search_sdk.utils.numeric import band, clamp, round_half_up
from motion_search_sdk.verifiers.base import VerifierBackend
from motion_search_sdk.verifiers.scoring import combine

logger = get_logger(__name__)

_DEFAULTS = VerifierThresholds()


def verify_semantic_local(sketch: Optional[VideoSketch],
                          candidate: TrajectoryCandidate,
                          goal: GoalSpec) -> SemanticScore:
    """
    Score how well the candidate's end state matches the goal

    The region term is 1.0 when the final center lies in the goal region and
    otherwise decays with the distance to the region center. The direction
    term maps the cosine between net displacement and goal direction to
    [0, 1]. The score averages the present terms over the goal's objects.

    The sketch is accepted for interface parity with remote verification;
    scoring reads the candidate geometry it was rendered from.
    """
    object_ids = [goal.object_id] if goal.object_id in candidate.object_ids() else candidate.object_ids()
    scores = []
    notes = []
    for object_id in object_ids:
        centers = candidate.centers(object_id)
        start, end = centers[0], centers[-1]
        terms = []
        if goal.goal_region is not None:
            region = goal.goal_region
            if region.contains((float(end[0]), float(end[1]))):
                region_term = 1.0
            else:
                distance = math.dist(end, region.center())
                region_term = 1.0 - clamp(distance / math.sqrt(2.0))
            terms.append(region_term)
            notes.append(f"{object_id} ends at ({end[0]:.3f}, {end[1]:.3f}), region term {region_term:.3f}")
        if goal.direction is not None:
            displacement = end - start
            norm = float(np.linalg.norm(displacement))
            if norm == 0.0:
                direction_term = 0.5
            else:
                cosine = float(np.dot(displacement, goal.direction)) / norm
                direction_term = (1.0 + clamp(cosine, -1.0, 1.0)) / 2.0
            terms.append(direction_term)
            notes.append(f"{object_id} direction term {direction_term:.3f}")
        scores.append(sum(terms) / len(terms))
    score = sum(scores) / len(scores) if scores else 0.0
    return SemanticScore(score=clamp(score), explanation="; ".join(notes))


def verify_newton(candidate: TrajectoryCandidate,
                  sub: Optional[SubInstruction] = None,
                  thresholds: VerifierThresholds = _DEFAULTS) -> LawScore:
    """
    Score acceleration plausibility

    Per object the score is the band of the largest frame-to-frame
    acceleration; any single-frame displacement above the jump threshold caps
    it. The law score is the minimum over objects.
    """
    if candidate.length < 3:
        return LawScore(law="newton", score=1.0, explanation=f"only {candidate.length} frame(s), acceleration not checked")

    worst = (1.0, "all objects move smoothly")
    for object_id in candidate.object_ids():
        centers = candidate.centers(object_id)
        if len(centers) < 3:
            continue
        velocity = np.diff(centers, axis=0)
        acceleration = np.diff(velocity, axis=0)
        max_accel = float(np.linalg.norm(acceleration, axis=1).max())
        max_speed = float(np.linalg.norm(velocity, axis=1).max())
        score = band(max_accel, thresholds.accel_ok, thresholds.accel_zero)
        note = f"{object_id}: max acceleration {max_accel:.4f}"
        if max_speed > thresholds.jump:
            score = min(score, thresholds.jump_cap)
            note += f", jump of {max_speed:.3f} in one frame (teleportation)"
        if score < worst[0]:
            worst = (score, note)
    return LawScore(law="newton", score=worst[0], explanation=worst[1])


def overlap_fraction(box: BBox, static_mask: np.ndarray) -> float:
    """Fraction of the box's pixels that are static"""
    height, width = static_mask.shape
    x0, y0, x1, y1 = box.pixel_rect(width, height)
    area = (x1 - x0) * (y1 - y0)
    return float(np.count_nonzero(static_mask[y0:y1, x0:x1])) / area


def verify_penetration(candidate: TrajectoryCandidate,
                       scene: SceneBundle,
                       thresholds: VerifierThresholds = _DEFAULTS) -> LawScore:
    """Score how far any box ever sinks into static scene pixels"""
    worst_fraction, where = 0.0, None
    for t, boxes in enumerate(candidate.frames):
        for object_id, box in boxes.items():
            fraction = overlap_fraction(box, scene.static_mask)
            if fraction > worst_fraction:
                worst_fraction, where = fraction, (object_id, t)
    score = band(worst_fraction, thresholds.penetration_ok, thresholds.penetration_zero)
    if where is None:
        explanation = "no overlap with static scene elements"
    else:
        explanation = f"{where[0]} overlaps static elements by {worst_fraction:.1%} at frame {where[1]}"
    return LawScore(law="penetration", score=score, explanation=explanation)


def is_supported(box: BBox,
                 scene: SceneBundle,
                 others: List[BBox],
                 thresholds: VerifierThresholds = _DEFAULTS) -> bool:
    """
    Whether something holds the box up

    Supported means the band just below the box bottom reaches the ground
    line, touches static pixels, or another object's top edge.
    """
    if box.y_max + thresholds.support_band >= scene.ground_line - 1e-9:
        return True

    height, width = scene.static_mask.shape
    x0, _, x1, y1 = box.pixel_rect(width, height)
    band_px = max(1, round_half_up(thresholds.support_band * height))
    if np.any(scene.static_mask[y1:min(y1 + band_px, height), x0:x1]):
        return True

    for other in others:
        overlaps_x = box.x_min < other.x_max and other.x_min < box.x_max
        gap = other.y_min - box.y_max
        if overlaps_x and -thresholds.stack_tolerance <= gap <= thresholds.support_band:
            return True
    return False


def unsupported_runs(flags: List[bool]) -> List[Tuple[int, int]]:
    """Maximal ``[start, end)`` runs of unsupported frames"""
    runs = []
    start = None
    for t, supported in enumerate(flags):
        if not supported and start is None:
            start = t
        elif supported and start is not None:
            runs.append((start, t))
            start = None
    if start is not None:
        runs.append((start, len(flags)))
    return runs


def fall_coefficient(ys: np.ndarray) -> float:
    """Quadratic coefficient of a least-squares fit of y over frame index"""
    t = np.arange(len(ys), dtype=float)
    return float(np.polyfit(t, ys, 2)[0])


def verify_gravity(candidate: TrajectoryCandidate,
                   scene: SceneBundle,
                   thresholds: VerifierThresholds = _DEFAULTS,
                   held_boxes: Optional[Mapping[str, BBox]] = None) -> LawScore:
    """
    Score whether unsupported stretches fall like a projectile

    Every run of at least ``min_unsupported_run`` unsupported frames must
    either accelerate downward (quadratic coefficient of y(t) at least
    ``g_min``) or it is a violation; long runs that barely move are hovers.
    Objects that are not moving support others at ``held_boxes`` (their
    initial boxes by default).
    """
    moving = candidate.object_ids()
    if held_boxes is None:
        held_boxes = {object_id: box for object_id, box in scene.initial_boxes().items() if object_id not in moving}
    held = [box for object_id, box in held_boxes.items() if object_id not in moving]

    score, explanation = 1.0, "every airborne stretch follows a falling arc"
    for object_id in moving:
        flags = []
        for boxes in candidate.frames:
            if object_id not in boxes:
                flags.append(True)
                continue
            others = [box for other_id, box in boxes.items() if other_id != object_id] + held
            flags.append(is_supported(boxes[object_id], scene, others, thresholds))

        ys = np.array(
            [(boxes[object_id].y_min + boxes[object_id].y_max) / 2 if object_id in boxes else np.nan
             for boxes in candidate.frames]
        )
        for start, end in unsupported_runs(flags):
            length = end - start
            if length < thresholds.min_unsupported_run:
                continue
            run = ys[start:end]
            travel = float(np.abs(np.diff(run)).sum())
            if length >= thresholds.hover_min_run and travel < thresholds.hover_motion:
                note = f"{object_id} hovers in mid-air for frames {start}-{end - 1}"
            else:
                coefficient = fall_coefficient(run)
                if coefficient >= thresholds.g_min:
                    continue
                note = (f"{object_id} is unsupported for frames {start}-{end - 1} "
                        f"without falling (curvature {coefficient:.5f})")
            if thresholds.violation_score < score:
                score, explanation = thresholds.violation_score, note
    return LawScore(law="gravity", score=score, explanation=explanation)


def verify_deformation(candidate: TrajectoryCandidate,
                       scene: Optional[SceneBundle] = None,
                       thresholds: VerifierThresholds = _DEFAULTS) -> LawScore:
    """Score how much non-resizable boxes change size relative to frame one"""
    worst_drift, worst_id = 0.0, None
    for object_id in candidate.object_ids():
        if scene is not None and object_id in scene.object_ids() and scene.object(object_id).resizable:
            continue
        boxes = candidate.boxes(object_id)
        w0, h0 = boxes[0].width, boxes[0].height
        drift = max(max(abs(box.width / w0 - 1.0), abs(box.height / h0 - 1.0)) for box in boxes)
        if drift > worst_drift:
            worst_drift, worst_id = drift, object_id
    score = band(worst_drift, thresholds.deformation_ok, thresholds.deformation_zero)
    if worst_id is None:
        explanation = "box sizes stay constant"
    else:
        explanation = f"{worst_id} changes size by up to {worst_drift:.1%}"
    return LawScore(law="deformation", score=score, explanation=explanation)


class LocalVerifier(VerifierBackend):
    """Deterministic verifier backend"""

    name = "local"

    def __init__(self, thresholds: Optional[VerifierThresholds] = None):
        self.thresholds = thresholds or VerifierThresholds()

    def verify(self,
               sketch: Optional[VideoSketch],
               candidate: TrajectoryCandidate,
               sub: SubInstruction,
               scene: SceneBundle,
               weights: VerifierWeights,
               held_boxes: Optional[Mapping[str, BBox]] = None) -> VerificationReport:
        semantic = verify_semantic_local(sketch, candidate, sub.goal)
        laws = [
            verify_newton(candidate, sub, self.thresholds),
            verify_penetration(candidate, scene, self.thresholds),
            verify_gravity(candidate, scene, self.thresholds, held_boxes),
            verify_deformation(candidate, scene, self.thresholds),
        ]
        scores: Dict[str, float] = {law.law: law.score for law in laws}
        combined = combine(semantic.score, scores, weights)
        logger.debug(
            f"Candidate {candidate.candidate_index}: semantic {semantic.score:.3f}, "
            + ", ".join(f"{law} {value:.3f}" for law, value in scores.items())
            + f", combined {combined:.3f}"
        )
        return VerificationReport(
            candidate_index=candidate.candidate_index,
            semantic=semantic,
            laws=laws,
            combined=combined,
            weights=weights,
        )
