"""
High-level plan models for the Motion Search SDK.
"""
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from motion_search_sdk.models.geometry import BBox

DEFAULT_TOTAL_FRAMES = 41
MAX_SUB_INSTRUCTIONS = 4


class GoalSpec(BaseModel):
    """Machine-checkable end goal of one sub-instruction"""
    goal_region: Optional[BBox] = None
    direction: Optional[Tuple[float, float]] = None
    description: str = ""
    # Object the goal refers to; None means every moving object of the phase
    object_id: Optional[str] = None

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_goal(self):
        if self.goal_region is None and self.direction is None:
            raise ValueError("GoalSpec needs a goal_region, a direction, or both")
        if self.direction is not None:
            norm = math.hypot(*self.direction)
            if abs(norm - 1.0) > 1e-6:
                raise ValueError(f"direction must have unit norm, got {norm}")
        return self

    @staticmethod
    def unit(dx: float, dy: float) -> Tuple[float, float]:
        """Normalize a direction vector"""
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise ValueError("direction must be non-zero")
        return (dx / norm, dy / norm)


class SubInstruction(BaseModel):
    """One phase of the decomposed prompt"""
    index: int
    text: str
    frame_budget: int = Field(ge=2)
    moving_ids: List[str] = Field(min_length=1)
    goal: GoalSpec

    model_config = ConfigDict(frozen=True, extra="forbid")


class HighLevelPlan(BaseModel):
    """Ordered sub-instructions whose frame budgets sum to the plan length"""
    sub_instructions: List[SubInstruction] = Field(min_length=1, max_length=MAX_SUB_INSTRUCTIONS)
    total_plan_frames: int = DEFAULT_TOTAL_FRAMES
    source_prompt: str = ""
    static_ids: List[str] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_budget(self):
        total = sum(sub.frame_budget for sub in self.sub_instructions)
        if total != self.total_plan_frames:
            raise ValueError(f"frame budgets sum to {total}, expected {self.total_plan_frames}")
        return self

    def frame_offset(self, index: int) -> int:
        """Number of plan frames before sub-instruction ``index`` (1-based)"""
        return sum(sub.frame_budget for sub in self.sub_instructions if sub.index < index)


def split_frames(total: int, phases: int) -> List[int]:
    """Split ``total`` frames evenly across phases, remainder to the last phase"""
    base = total // phases
    budgets = [base] * phases
    budgets[-1] += total - base * phases
    return budgets
