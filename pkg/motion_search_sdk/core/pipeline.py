"""
End-to-end planning: decompose the prompt, then search each sub-instruction
from the context left by the previous one.
"""
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from motion_search_sdk.core.errors import SchemaError
from motion_search_sdk.core.search import Backends, CandidateSink, SubInstructionTrace, search_sub_instruction
from motion_search_sdk.models.config import SearchConfig
from motion_search_sdk.models.plan import HighLevelPlan
from motion_search_sdk.models.report import VerificationReport
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.trajectory import PlanningContext, TrajectoryCandidate
from motion_search_sdk.rendering.renderer import last_frame
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)


class SearchTrace(BaseModel):
    """Trace of a whole run: the plan and one record per searched sub-instruction"""
    prompt: str
    plan: Optional[HighLevelPlan] = None
    proposed_moving: Optional[List[str]] = None
    sub_instructions: List[SubInstructionTrace] = Field(default_factory=list)
    completed: bool = False

    @property
    def below_threshold(self) -> bool:
        return any(sub.below_threshold for sub in self.sub_instructions)


@dataclass
class PipelineResult:
    """Selected trajectories and sketches of every sub-instruction"""
    plan: HighLevelPlan
    selected: List[TrajectoryCandidate]
    sketches: List[VideoSketch]
    reports: List[VerificationReport]
    context_frames: List[np.ndarray]
    trace: SearchTrace
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def below_threshold(self) -> bool:
        return self.trace.below_threshold


def _check_plan(plan: HighLevelPlan, scene: SceneBundle) -> None:
    known = set(scene.object_ids())
    for sub in plan.sub_instructions:
        unknown = [object_id for object_id in sub.moving_ids if object_id not in known]
        if unknown:
            raise SchemaError("unknown_object", f"sub-instruction {sub.index} moves unknown object(s) {unknown}",
                              field=f"phases[{sub.index - 1}].object_ids")


def run_pipeline(prompt: str,
                 scene: SceneBundle,
                 backends: Backends,
                 config: SearchConfig,
                 sink: Optional[CandidateSink] = None) -> PipelineResult:
    """
    Plan and search every sub-instruction in order

    The first sub-instruction starts from the scene's initial frame; each
    later one starts from the last frame of the previously selected sketch,
    with the boxes that sketch ended at.

    Raises:
        Any backend error; the trace gathered so far is attached to the
        exception as ``partial_trace``.
    """
    trace = SearchTrace(prompt=prompt)
    timings: Dict[str, float] = {}
    try:
        started = time.perf_counter()
        if not scene.has_motion_labels():
            trace.proposed_moving, _ = backends.planner.propose_objects(prompt, scene)
        plan = backends.planner.propose_plan(prompt, scene)
        _check_plan(plan, scene)
        trace.plan = plan
        timings["plan"] = time.perf_counter() - started

        context = PlanningContext(
            frame=scene.initial_frame,
            boxes=scene.initial_boxes(),
            frame_offset=0,
            total_frames=plan.total_plan_frames,
            prompt=prompt,
        )
        selected, sketches, reports, context_frames = [], [], [], []
        for sub in plan.sub_instructions:
            context_frames.append(context.frame)
            result = search_sub_instruction(sub, context, scene, backends, config, sink)
            trace.sub_instructions.append(result.trace)
            for stage, seconds in result.timings.items():
                timings[stage] = timings.get(stage, 0.0) + seconds

            selected.append(result.candidate)
            sketches.append(result.sketch)
            reports.append(result.report)

            boxes = dict(context.boxes)
            boxes.update(result.candidate.frames[-1])
            ends = ", ".join(f"{object_id} at {box.to_list()}" for object_id, box in result.candidate.frames[-1].items())
            context = PlanningContext(
                frame=last_frame(result.sketch),
                boxes=boxes,
                history=context.history + [f"Phase {sub.index} ({sub.text}) is done: {ends}."],
                frame_offset=context.frame_offset + sub.frame_budget,
                total_frames=plan.total_plan_frames,
                prompt=prompt,
            )
        trace.completed = True
    except Exception as e:
        e.partial_trace = trace
        raise

    return PipelineResult(
        plan=plan,
        selected=selected,
        sketches=sketches,
        reports=reports,
        context_frames=context_frames,
        trace=trace,
        timings=timings,
    )
