"""
Deterministic scripted planner.

Candidates are seeded perturbations of the straight path from an object's
current box to its goal, optionally mixed with planted violations that each
break one physical law. The random stream of candidate ``k`` depends only on
``(seed, sub-instruction, attempt, k)``, so asking for more candidates never
changes the earlier ones.
"""
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from motion_search_sdk.core.errors import ConfigError
from motion_search_sdk.models.geometry import BBox, Point
from motion_search_sdk.models.plan import DEFAULT_TOTAL_FRAMES, GoalSpec, HighLevelPlan, SubInstruction
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.trajectory import PlannerFeedback, PlanningContext, TrajectoryCandidate
from motion_search_sdk.planners.base import PlannerBackend
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

CLEAN_VARIANTS = ("straight", "perturbed")

# Planted violation for each law
VIOLATIONS = {
    "newton": "teleport",
    "penetration": "penetration",
    "gravity": "hover",
    "deformation": "size_drift",
}

VARIANTS = CLEAN_VARIANTS + tuple(VIOLATIONS.values())

PROFILES = ("linear", "ease_in", "ease_out")

TELEPORT_MIN_JUMP = 0.16
TELEPORT_OVERSHOOT = 0.2


class ScriptedPlanner(PlannerBackend):
    """
    Seeded planner that needs no model

    Args:
        seed: Non-negative base seed
        planted: Fixed variant cycle; candidate ``k`` uses
            ``planted[k % len(planted)]`` and feedback is ignored
        violation_rate: Without ``planted``, the probability that a candidate
            is a violation; violations whose law was reported as the worst in
            feedback are avoided
    """

    name = "scripted"

    def __init__(self, seed: int = 0, planted: Optional[Sequence[str]] = None, violation_rate: float = 0.5):
        if seed < 0:
            raise ConfigError(f"Scripted planner seed must be non-negative, got {seed}", field="seed")
        unknown = [v for v in planted or () if v not in VARIANTS]
        if unknown:
            raise ConfigError(f"Unknown planted variant(s) {unknown}. Options: {', '.join(VARIANTS)}",
                              field="planted")
        self.seed = seed
        self.planted = list(planted) if planted else None
        self.violation_rate = violation_rate

    def propose_plan(self, prompt: str, scene: SceneBundle) -> HighLevelPlan:
        """
        Use the manifest's plan; without one, move the first moving object
        0.4 toward the side of the image with more room
        """
        plan = scene.plan()
        if plan is not None:
            if prompt:
                plan = plan.model_copy(update={"source_prompt": prompt})
            return plan

        moving, static = self.propose_objects(prompt, scene)
        if not moving:
            moving = scene.object_ids()[:1]
        asset = scene.object(moving[0])
        box = asset.initial_box
        cx, cy = box.center()
        dx = 1.0 if cx < 0.5 else -1.0
        target = BBox.from_center((cx + 0.4 * dx, cy), box.width, box.height)
        region = BBox.from_center(target.center(), min(box.width + 0.1, 1.0), min(box.height + 0.1, 1.0))
        word = "right" if dx > 0 else "left"
        goal = GoalSpec(
            goal_region=region,
            direction=(dx, 0.0),
            description=f"the {asset.label} ends further {word}",
            object_id=asset.id,
        )
        sub = SubInstruction(
            index=1,
            text=prompt or f"move the {asset.label} {word}",
            frame_budget=DEFAULT_TOTAL_FRAMES,
            moving_ids=[asset.id],
            goal=goal,
        )
        return HighLevelPlan(
            sub_instructions=[sub],
            total_plan_frames=DEFAULT_TOTAL_FRAMES,
            source_prompt=prompt,
            static_ids=static,
        )

    def propose_trajectories(self,
                             sub: SubInstruction,
                             context: PlanningContext,
                             scene: SceneBundle,
                             k: int,
                             feedback: Optional[PlannerFeedback] = None,
                             start_index: int = 0) -> List[TrajectoryCandidate]:
        attempt = feedback.attempt if feedback else 0
        avoid = set()
        if feedback is not None and not self.planted:
            avoid = {VIOLATIONS[law] for law in feedback.worst_laws() if law in VIOLATIONS}

        candidates = []
        for index in range(start_index, start_index + k):
            rng = np.random.default_rng([self.seed, sub.index, attempt, index])
            variant = self._variant(index, rng, avoid)
            frames = self._frames(variant, sub, context, scene, rng)
            candidates.append(TrajectoryCandidate(candidate_index=index, frames=frames, variant=variant))
        logger.debug(
            f"Scripted planner sampled {k} candidate(s) for sub-instruction {sub.index}: "
            + ", ".join(c.variant for c in candidates)
        )
        return candidates

    def _variant(self, index: int, rng: np.random.Generator, avoid: set) -> str:
        if self.planted:
            return self.planted[index % len(self.planted)]
        if rng.random() < self.violation_rate:
            options = [v for v in VIOLATIONS.values() if v not in avoid]
            if options:
                return options[int(rng.integers(len(options)))]
        return "perturbed"

    def _frames(self,
                variant: str,
                sub: SubInstruction,
                context: PlanningContext,
                scene: SceneBundle,
                rng: np.random.Generator) -> List[Dict[str, BBox]]:
        T = sub.frame_budget
        frames: List[Dict[str, BBox]] = [{} for _ in range(T)]
        # draw once per candidate so every object shares the variant's parameters
        params = {
            "factor": rng.uniform(0.85, 1.0),
            "profile": PROFILES[int(rng.integers(len(PROFILES)))],
            "jump_frame": int(rng.integers(1, T)),
            "lift": rng.uniform(0.15, 0.25),
            "scale": rng.uniform(1.6, 2.0),
        }
        for object_id in sub.moving_ids:
            box = context.boxes.get(object_id) or scene.object(object_id).initial_box
            start = np.array(box.center(), dtype=float)
            if sub.goal.object_id in (None, object_id):
                target = np.array(_goal_center(sub.goal, box), dtype=float)
            else:
                target = start.copy()
            boxes = _variant_boxes(variant, start, target, box, T, scene, sub.goal, params)
            for t in range(T):
                frames[t][object_id] = boxes[t]
        return frames


def _goal_center(goal: GoalSpec, box: BBox) -> Point:
    if goal.goal_region is not None:
        return goal.goal_region.center()
    cx, cy = box.center()
    dx, dy = goal.direction
    return (cx + 0.3 * dx, cy + 0.3 * dy)


def _progress(T: int, profile: str) -> np.ndarray:
    s = np.linspace(0.0, 1.0, T)
    if profile == "ease_in":
        return s ** 2
    if profile == "ease_out":
        return 1.0 - (1.0 - s) ** 2
    return s


def _path(start: np.ndarray, end: np.ndarray, T: int, profile: str = "linear") -> np.ndarray:
    return start + (end - start) * _progress(T, profile)[:, None]


def _variant_boxes(variant: str,
                   start: np.ndarray,
                   target: np.ndarray,
                   box: BBox,
                   T: int,
                   scene: SceneBundle,
                   goal: GoalSpec,
                   params: dict) -> List[BBox]:
    w, h = box.width, box.height
    sizes = [(w, h)] * T

    if variant == "straight":
        centers = _path(start, target, T)
    elif variant == "perturbed":
        end = start + params["factor"] * (target - start)
        centers = _path(start, end, T, params["profile"])
    elif variant == "teleport":
        centers = _teleport(start, target, T, w, goal, params["jump_frame"])
    elif variant == "penetration":
        obstacle = _nearest_static_point((start + target) / 2, scene)
        centers = _path(start, obstacle if obstacle is not None else target, T)
    elif variant == "hover":
        centers = _path(start, target, T)
        centers[:, 1] -= params["lift"]
    elif variant == "size_drift":
        centers = _path(start, target, T)
        growth = 1.0 + (params["scale"] - 1.0) * _progress(T, "ease_in")
        sizes = [(min(w * g, 1.0), min(h * g, 1.0)) for g in growth]
        bottoms = centers[:, 1] + h / 2
        centers[:, 1] = bottoms - np.array([size[1] for size in sizes]) / 2
    else:
        raise ConfigError(f"Unknown variant '{variant}'", field="planted")

    return [BBox.from_center((float(c[0]), float(c[1])), sw, sh) for c, (sw, sh) in zip(centers, sizes)]


def _teleport(start: np.ndarray, target: np.ndarray, T: int, width: float, goal: GoalSpec, jump_frame: int) -> np.ndarray:
    """Hold at the start, then cover the remaining distance in a single frame"""
    distance = float(np.linalg.norm(target - start))
    if distance > TELEPORT_MIN_JUMP:
        end = target
    else:
        if distance > 0:
            direction = (target - start) / distance
        elif goal.direction is not None:
            direction = np.array(goal.direction, dtype=float)
        else:
            direction = np.array([1.0, 0.0])
        end = start + direction * TELEPORT_OVERSHOOT
        # overshoot toward the side with room so the box is not pushed back
        if not (width / 2 <= end[0] <= 1.0 - width / 2):
            end = start - direction * TELEPORT_OVERSHOOT
        jump_frame = T - 1
    centers = np.repeat(start[None, :], T, axis=0)
    centers[jump_frame:] = end
    return centers


def _nearest_static_point(point: np.ndarray, scene: SceneBundle) -> Optional[np.ndarray]:
    """Center of the static pixel nearest ``point``, preferring pixels above the ground line"""
    mask = scene.static_mask
    height, width = mask.shape
    ground_row = int(math.floor(scene.ground_line * height))
    rows, cols = np.nonzero(mask[:ground_row])
    if rows.size == 0:
        rows, cols = np.nonzero(mask)
    if rows.size == 0:
        return None
    xs = (cols + 0.5) / width
    ys = (rows + 0.5) / height
    nearest = int(np.argmin((xs - point[0]) ** 2 + (ys - point[1]) ** 2))
    return np.array([xs[nearest], ys[nearest]])


def scripted_planner(seed: int = 0, planted: Optional[Sequence[str]] = None,
                     violation_rate: float = 0.5) -> ScriptedPlanner:
    """Build the deterministic planner backend"""
    return ScriptedPlanner(seed=seed, planted=planted, violation_rate=violation_rate)
