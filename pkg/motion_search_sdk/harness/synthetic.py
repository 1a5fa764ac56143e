"""
Seeded synthetic scene bundles: one colored shape resting on a floor strip,
optional obstacles and a pre-authored plan that slides the shape to the right.
"""
import os
from typing import List, Tuple

import numpy as np

from motion_search_sdk.core.errors import IoError
from motion_search_sdk.models.config import SyntheticSceneSpec
from motion_search_sdk.models.geometry import BBox, pixel_box_to_bbox
from motion_search_sdk.models.plan import GoalSpec, split_frames
from motion_search_sdk.models.scene import Manifest, ObjectAsset, ObjectEntry, PhaseEntry, SceneBundle
from motion_search_sdk.scene.bundle import save_scene_bundle
from motion_search_sdk.utils.images import frozen
from motion_search_sdk.utils.logging_setup import get_logger
from motion_search_sdk.utils.numeric import round_half_up

logger = get_logger(__name__)

OBJECT_ID = "obj_0"
START_X = 0.15
# Goal centers along x for one- and two-phase plans
GOAL_X = {1: (0.7,), 2: (0.45, 0.7)}
GOAL_MARGIN = 0.1
OBSTACLE_WIDTH = 0.06
OBSTACLE_GAP = 0.02

PALETTE = (
    (200, 40, 40),
    (40, 160, 60),
    (40, 80, 200),
    (220, 170, 30),
    (150, 60, 180),
)
SKY = np.array([178, 206, 228], dtype=float)
FLOOR = np.array([120, 96, 70], dtype=float)
OBSTACLE = np.array([90, 90, 96], dtype=float)


def _shape_mask(shape: str, size: int) -> np.ndarray:
    if shape == "square":
        return np.ones((size, size), dtype=bool)
    center = (size - 1) / 2
    yy, xx = np.mgrid[0:size, 0:size]
    return (xx - center) ** 2 + (yy - center) ** 2 <= (size / 2) ** 2


def _obstacle_rects(spec: SyntheticSceneSpec,
                    rng: np.random.Generator,
                    goal_region: BBox,
                    ground_px: int) -> List[Tuple[int, int, int, int]]:
    W, H = spec.width, spec.height
    rects = []
    if spec.obstacles == 0:
        return rects
    heights = rng.uniform(0.1, 0.25, size=spec.obstacles)
    lefts: List[float] = []
    count = spec.obstacles
    if spec.obstacle_in_goal:
        lefts.append(goal_region.center()[0] - OBSTACLE_WIDTH / 2)
        count -= 1
    start = goal_region.x_max + OBSTACLE_GAP
    room = 0.98 - start
    width = min(OBSTACLE_WIDTH, room / max(count, 1) - OBSTACLE_GAP)
    for i in range(count):
        lefts.append(start + i * (width + OBSTACLE_GAP))
    for i, left in enumerate(lefts):
        w = OBSTACLE_WIDTH if spec.obstacle_in_goal and i == 0 else width
        x0 = round_half_up(left * W)
        x1 = max(x0 + 1, round_half_up((left + w) * W))
        y0 = max(0, ground_px - max(1, round_half_up(heights[i] * H)))
        rects.append((x0, y0, min(x1, W), ground_px))
    return rects


def make_synthetic_scene(spec: SyntheticSceneSpec) -> SceneBundle:
    """
    Build a scene bundle in memory from a seeded recipe

    The shape rests exactly on the floor, every goal region is centered on
    the shape's starting height, and obstacles stand beyond the final goal
    unless ``obstacle_in_goal`` puts the first one inside it.
    """
    rng = np.random.default_rng(spec.seed)
    W, H = spec.width, spec.height
    ground_px = H - max(1, round_half_up(spec.floor_height * H))

    # background: sky gradient over a floor strip, with seeded texture
    shade = np.linspace(1.0, 0.85, H)[:, None, None]
    background = np.broadcast_to(SKY * shade, (H, W, 3)).copy()
    background[ground_px:] = FLOOR
    background += rng.integers(-10, 11, size=(H, W, 3))
    static_mask = np.zeros((H, W), dtype=bool)
    static_mask[ground_px:] = True

    size = max(2, round_half_up(spec.object_size * min(W, H)))
    x0 = round_half_up(START_X * W)
    y1 = ground_px
    y0 = y1 - size
    box = pixel_box_to_bbox(x0, y0, x0 + size, y1, W, H)
    cy = box.center()[1]

    budgets = split_frames(spec.frame_budget, spec.phases)
    phases = []
    goal_regions = []
    for goal_x, budget in zip(GOAL_X[spec.phases], budgets):
        region = BBox.from_center((goal_x, cy), min(box.width + GOAL_MARGIN, 1.0), min(box.height + GOAL_MARGIN, 1.0))
        goal_regions.append(region)
        where = "to the middle of the floor" if goal_x < GOAL_X[1][0] else "to the right side"
        phases.append(
            PhaseEntry(
                text=f"the {spec.label} slides {where}",
                frame_budget=budget,
                moving_ids=[OBJECT_ID],
                goal=GoalSpec(
                    goal_region=region,
                    direction=(1.0, 0.0),
                    description=f"the {spec.label} rests {where}",
                    object_id=OBJECT_ID,
                ),
            )
        )

    for ox0, oy0, ox1, oy1 in _obstacle_rects(spec, rng, goal_regions[-1], ground_px):
        background[oy0:oy1, ox0:ox1] = OBSTACLE
        static_mask[oy0:oy1, ox0:ox1] = True
    background = np.clip(background, 0, 255).astype(np.uint8)

    color = spec.color or PALETTE[int(rng.integers(len(PALETTE)))]
    crop = _shape_mask(spec.shape, size)
    sprite = np.zeros((size, size, 4), dtype=np.uint8)
    sprite[crop, :3] = color
    sprite[crop, 3] = 255
    mask = np.zeros((H, W), dtype=bool)
    mask[y0:y1, x0:x0 + size] = crop

    frame = background.copy()
    frame[y0:y1, x0:x0 + size][crop] = color

    manifest = Manifest(
        width=W,
        height=H,
        ground_line=ground_px / H,
        prompt=f"The {spec.label} slides to the right along the floor",
        objects=[
            ObjectEntry(
                id=OBJECT_ID,
                label=spec.label,
                sprite=f"objects/{OBJECT_ID}/sprite.png",
                mask=f"objects/{OBJECT_ID}/mask.png",
                initial_box=box,
                motion="moving",
            )
        ],
        plan=phases,
    )
    asset = ObjectAsset(
        id=OBJECT_ID,
        label=spec.label,
        sprite=frozen(sprite),
        mask=frozen(mask),
        initial_box=box,
        motion="moving",
    )
    return SceneBundle(
        initial_frame=frozen(frame),
        background=frozen(background),
        objects=(asset,),
        static_mask=frozen(static_mask),
        ground_line=ground_px / H,
        manifest=manifest,
    )


def cmd_make_synthetic(spec: SyntheticSceneSpec, path: str) -> str:
    """
    Write a synthetic scene bundle directory

    Returns:
        str: the bundle directory

    Raises:
        IoError: when a file cannot be written
    """
    bundle = make_synthetic_scene(spec)
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise IoError(f"Could not create {path}: {e}", field=path) from e
    save_scene_bundle(bundle, path)
    logger.info(f"Wrote synthetic scene (seed {spec.seed}, {spec.width}x{spec.height}) to {path}")
    return path
