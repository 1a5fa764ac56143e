"""
Remote planner backed by a multimodal chat model.
"""
from typing import Dict, List, Optional, Tuple

from motion_search_sdk.core.errors import SchemaError
from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.models.files import ImageFile
from motion_search_sdk.models.message import Message
from motion_search_sdk.models.plan import DEFAULT_TOTAL_FRAMES, HighLevelPlan, SubInstruction
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.trajectory import PlannerFeedback, PlanningContext, TrajectoryCandidate
from motion_search_sdk.planners.base import PlannerBackend
from motion_search_sdk.planners.parsing import parse_plan_response, parse_trajectory_response
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.prompts import render
from motion_search_sdk.transport.base import build_transport
from motion_search_sdk.transport.client import ModelClient
from motion_search_sdk.utils.json_text import find_json
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)


def _fmt_box(values: List[float]) -> str:
    return "[" + ", ".join(f"{v:.3f}" for v in values) + "]"


class RemotePlanner(PlannerBackend):
    """
    Planner that prompts a remote model

    Every call is one request; malformed replies are resampled by the
    :class:`ModelClient` up to its retry cap.
    """

    name = "remote"

    def __init__(self, client: ModelClient, total_frames: int = DEFAULT_TOTAL_FRAMES):
        self.client = client
        self.total_frames = total_frames

    @staticmethod
    def known_objects(scene: SceneBundle) -> Dict[str, str]:
        """Names the model may use for scene objects: ids and labels"""
        names = {asset.label: asset.id for asset in scene.objects}
        names.update({asset.id: asset.id for asset in scene.objects})
        return names

    def propose_plan(self, prompt: str, scene: SceneBundle) -> HighLevelPlan:
        object_lines = "\n".join(
            f"- {asset.id}: currently at {_fmt_box(asset.initial_box.to_list())}" for asset in scene.objects
        )
        schema = render("plan_schema", total_frames=self.total_frames)
        messages = [
            Message(role="system", text=render("high_level_system", total_frames=self.total_frames)),
            Message(
                role="user",
                text=render(
                    "high_level_user",
                    text_prompt=prompt,
                    total_frames=self.total_frames,
                    object_lines=object_lines,
                    plan_schema=schema,
                ),
                images=[ImageFile.from_array("frame.png", scene.initial_frame)],
            ),
        ]
        names = self.known_objects(scene)
        plan = self.client.complete_parsed(
            messages, lambda text: parse_plan_response(text, self.total_frames, names)
        )
        logger.info(f"Remote planner produced {len(plan.sub_instructions)} sub-instruction(s)")
        return plan.model_copy(update={"source_prompt": prompt})

    def propose_objects(self, prompt: str, scene: SceneBundle) -> Tuple[List[str], List[str]]:
        """
        Ask the model which objects move

        Only used when the manifest does not label objects; labels win.
        """
        if scene.has_motion_labels():
            return super().propose_objects(prompt, scene)

        names = self.known_objects(scene)
        messages = [
            Message(role="system", text=render("object_proposal_system")),
            Message(
                role="user",
                text=render("object_proposal_user", TEXT_PROMPT=prompt),
                images=[ImageFile.from_array("frame.png", scene.initial_frame)],
            ),
        ]

        def parse(text: str) -> Tuple[List[str], List[str]]:
            data = find_json(text)
            if not isinstance(data, dict) or not isinstance(data.get("moving_objects"), list):
                raise SchemaError("missing_field", "object proposal has no 'moving_objects' list",
                                  field="moving_objects")
            moving = [names[n] for n in data["moving_objects"] if isinstance(n, str) and n in names]
            if not moving:
                raise SchemaError("unknown_object", "object proposal names no scene object as moving",
                                  field="moving_objects")
            static = [object_id for object_id in scene.object_ids() if object_id not in moving]
            return moving, static

        return self.client.complete_parsed(messages, parse)

    def propose_trajectories(self,
                             sub: SubInstruction,
                             context: PlanningContext,
                             scene: SceneBundle,
                             k: int,
                             feedback: Optional[PlannerFeedback] = None,
                             start_index: int = 0) -> List[TrajectoryCandidate]:
        messages = self._trajectory_messages(sub, context, scene, feedback)
        names = self.known_objects(scene)
        candidates: List[TrajectoryCandidate] = []
        while len(candidates) < k:
            index = start_index + len(candidates)
            parsed = self.client.complete_parsed(
                messages, lambda text: parse_trajectory_response(text, sub, index, names)
            )
            candidates.extend(parsed[:k - len(candidates)])
        return candidates

    def _trajectory_messages(self,
                             sub: SubInstruction,
                             context: PlanningContext,
                             scene: SceneBundle,
                             feedback: Optional[PlannerFeedback]) -> List[Message]:
        chunk_start = context.frame_offset + 1
        chunk_end = context.frame_offset + sub.frame_budget
        moving = ", ".join(sub.moving_ids)
        static = ", ".join(object_id for object_id in scene.object_ids() if object_id not in sub.moving_ids) or "none"
        current = "\n".join(f"  - {object_id}: {_fmt_box(box.to_list())}" for object_id, box in context.boxes.items())
        phase_name = f"phase {sub.index}"

        history = list(context.history)
        if feedback is not None:
            history.append(feedback.to_text())
        history_text = "\n".join(history) if history else "This is the first phase to plan."

        system = render(
            "trajectory_system",
            CHUNK_START=chunk_start,
            CHUNK_END=chunk_end,
            PHASE_NAME=phase_name,
            PHASE_DESCRIPTION=sub.text,
            TOTAL_FRAMES_NUM=context.total_frames,
            COORDS_GUIDE=render("coords_guide", CURRENT_BOXES=current),
            MOVING_OBJECTS=moving,
            STATIC_OBJECTS=static,
        )
        user = render(
            "trajectory_user",
            TEXT_PROMPT=context.prompt or sub.text,
            HISTORY_TEXT=history_text,
            CHUNK_START=chunk_start,
            CHUNK_END=chunk_end,
            PHASE_NAME=phase_name,
            MOVING_OBJECTS=moving,
        )
        return [
            Message(role="system", text=system),
            Message(role="user", text=user, images=[ImageFile.from_array("context.png", context.frame)]),
        ]


def remote_planner(endpoint_config: EndpointConfig,
                   plugins: Optional[List[TransportPlugin]] = None) -> RemotePlanner:
    """Build a remote planner from an endpoint configuration"""
    client = ModelClient(
        build_transport(endpoint_config),
        model=endpoint_config.model,
        temperature=endpoint_config.temperature,
        plugins=plugins,
        max_retries=endpoint_config.max_retries,
    )
    return RemotePlanner(client)
