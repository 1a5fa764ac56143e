"""
Base class for planner backends.
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

from motion_search_sdk.models.plan import HighLevelPlan, SubInstruction
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.trajectory import PlannerFeedback, PlanningContext, TrajectoryCandidate


class PlannerBackend(ABC):
    """Produces high-level plans and trajectory candidates"""

    name = "planner"

    @abstractmethod
    def propose_plan(self, prompt: str, scene: SceneBundle) -> HighLevelPlan:
        """Decompose the prompt into sub-instructions"""

    @abstractmethod
    def propose_trajectories(self,
                             sub: SubInstruction,
                             context: PlanningContext,
                             scene: SceneBundle,
                             k: int,
                             feedback: Optional[PlannerFeedback] = None,
                             start_index: int = 0) -> List[TrajectoryCandidate]:
        """
        Sample ``k`` candidates for one sub-instruction

        Args:
            sub: The sub-instruction to plan
            context: Context frame and current object boxes
            scene: The scene bundle
            k: Number of candidates to return
            feedback: Failure summaries of the previous round, if any
            start_index: Candidate index of the first returned candidate;
                indices continue when the caller refills after filtering
        """

    def propose_objects(self, prompt: str, scene: SceneBundle) -> Tuple[List[str], List[str]]:
        """
        Split scene objects into moving and static ids

        Manifest labels win; without them every object is assumed to move.
        """
        moving = [asset.id for asset in scene.objects if asset.motion != "static"]
        static = [asset.id for asset in scene.objects if asset.motion == "static"]
        return moving, static
