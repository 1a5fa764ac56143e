"""
Trajectory models for the Motion Search SDK.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from motion_search_sdk.models.geometry import BBox, Point, bbox_center
from motion_search_sdk.models.plan import DEFAULT_TOTAL_FRAMES


class TrajectoryCandidate(BaseModel):
    """Per-frame boxes of the moving objects for one sub-instruction"""
    candidate_index: int
    frames: List[Dict[str, BBox]] = Field(min_length=1)
    caption_per_frame: Optional[List[str]] = None
    # Which scripted variant produced the candidate, when known
    variant: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @property
    def length(self) -> int:
        return len(self.frames)

    def object_ids(self) -> List[str]:
        ids: List[str] = []
        for frame in self.frames:
            for object_id in frame:
                if object_id not in ids:
                    ids.append(object_id)
        return ids

    def boxes(self, object_id: str) -> List[BBox]:
        return [frame[object_id] for frame in self.frames if object_id in frame]

    def centers(self, object_id: str) -> np.ndarray:
        """``(T, 2)`` array of box centers for one object"""
        return np.array([bbox_center(box) for box in self.boxes(object_id)], dtype=float)

    def start_box(self, object_id: str) -> BBox:
        return self.boxes(object_id)[0]

    def end_box(self, object_id: str) -> BBox:
        return self.boxes(object_id)[-1]


class RejectedSummary(BaseModel):
    """Why one candidate of a failed round was rejected"""
    candidate_index: int
    combined_score: float
    worst_law: str
    explanation: str
    start_boxes: Dict[str, BBox] = Field(default_factory=dict)
    end_boxes: Dict[str, BBox] = Field(default_factory=dict)


class PlannerFeedback(BaseModel):
    """Failure feedback injected into the next sampling round"""
    rejected_summaries: List[RejectedSummary]
    attempt: int = Field(ge=1)

    def worst_laws(self) -> List[str]:
        return [summary.worst_law for summary in self.rejected_summaries]

    def to_text(self) -> str:
        """Render the feedback for the trajectory prompt's history slot"""
        lines = [f"Previous attempt #{self.attempt} was rejected. Avoid these failure cases:"]
        for summary in self.rejected_summaries:
            lines.append(
                f"- candidate {summary.candidate_index} scored {summary.combined_score:.2f}; "
                f"worst law: {summary.worst_law}; {summary.explanation}"
            )
            for object_id, start in summary.start_boxes.items():
                end = summary.end_boxes.get(object_id)
                end_text = _fmt_box(end) if end is not None else "?"
                lines.append(f"  {object_id}: {_fmt_box(start)} -> {end_text}")
        return "\n".join(lines)


def _fmt_box(box: BBox) -> str:
    return "[" + ", ".join(f"{v:.3f}" for v in box.to_list()) + "]"


@dataclass(frozen=True, eq=False)
class PlanningContext:
    """
    Visual and geometric context a sub-instruction is planned from

    ``frame`` is the initial frame for the first sub-instruction and the last
    frame of the previously selected sketch afterwards.
    """
    frame: np.ndarray
    boxes: Dict[str, BBox]
    history: List[str] = field(default_factory=list)
    # Plan frames before this sub-instruction and in the whole plan
    frame_offset: int = 0
    total_frames: int = DEFAULT_TOTAL_FRAMES
    prompt: str = ""

    def center(self, object_id: str) -> Point:
        return bbox_center(self.boxes[object_id])
