"""
Scene models for the Motion Search SDK.

A scene bundle stands in for the segmentation and inpainting stage: it carries
the initial frame, the clean background, one sprite and mask per object and the
static obstacle mask.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import DEFAULT_TOTAL_FRAMES, GoalSpec, HighLevelPlan, SubInstruction

MANIFEST_VERSION = 1


class ObjectEntry(BaseModel):
    """Manifest entry for one object"""
    id: str
    label: str
    sprite: str
    mask: str
    initial_box: BBox
    resizable: bool = False
    motion: Optional[Literal["moving", "static"]] = None

    model_config = ConfigDict(extra="forbid")


class PhaseEntry(BaseModel):
    """Manifest entry for one sub-instruction of a pre-authored plan"""
    text: str
    frame_budget: int = Field(ge=2)
    moving_ids: List[str] = Field(min_length=1)
    goal: GoalSpec

    model_config = ConfigDict(extra="forbid")


class Manifest(BaseModel):
    """The ``manifest.json`` document of a scene bundle"""
    version: int = MANIFEST_VERSION
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    frame: str = "frame.png"
    background: str = "background.png"
    static_mask: str = "static_mask.png"
    ground_line: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    prompt: str = ""
    objects: List[ObjectEntry]
    plan: Optional[List[PhaseEntry]] = None

    model_config = ConfigDict(extra="forbid")


@dataclass(frozen=True, eq=False)
class ObjectAsset:
    """One object cut out of the initial frame"""
    id: str
    label: str
    sprite: np.ndarray  # RGBA, cropped to the mask bounding box
    mask: np.ndarray  # bool, full frame
    initial_box: BBox
    resizable: bool = False
    motion: Optional[str] = None


@dataclass(frozen=True, eq=False)
class SceneBundle:
    """Validated scene inputs; immutable and safe to share across threads"""
    initial_frame: np.ndarray  # RGB, H x W x 3
    background: np.ndarray  # RGB, H x W x 3
    objects: Tuple[ObjectAsset, ...]
    static_mask: np.ndarray  # bool, H x W
    ground_line: float = 1.0
    manifest: Optional[Manifest] = field(default=None, repr=False)

    @property
    def width(self) -> int:
        return int(self.background.shape[1])

    @property
    def height(self) -> int:
        return int(self.background.shape[0])

    @property
    def prompt(self) -> str:
        return self.manifest.prompt if self.manifest else ""

    def object(self, object_id: str) -> ObjectAsset:
        for asset in self.objects:
            if asset.id == object_id:
                return asset
        raise KeyError(object_id)

    def object_ids(self) -> List[str]:
        return [asset.id for asset in self.objects]

    def initial_boxes(self) -> Dict[str, BBox]:
        return {asset.id: asset.initial_box for asset in self.objects}

    def labels(self) -> Dict[str, str]:
        return {asset.label: asset.id for asset in self.objects}

    def has_motion_labels(self) -> bool:
        return all(asset.motion is not None for asset in self.objects)

    def plan(self) -> Optional[HighLevelPlan]:
        """The pre-authored plan from the manifest, if any"""
        if self.manifest is None or not self.manifest.plan:
            return None
        subs = [
            SubInstruction(
                index=i,
                text=phase.text,
                frame_budget=phase.frame_budget,
                moving_ids=list(phase.moving_ids),
                goal=phase.goal,
            )
            for i, phase in enumerate(self.manifest.plan, start=1)
        ]
        return HighLevelPlan(
            sub_instructions=subs,
            total_plan_frames=sum(sub.frame_budget for sub in subs) or DEFAULT_TOTAL_FRAMES,
            source_prompt=self.prompt,
            static_ids=[asset.id for asset in self.objects if asset.motion == "static"],
        )
