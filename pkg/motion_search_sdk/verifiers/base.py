"""
Base class for verifier backends.
"""
from abc import ABC, abstractmethod
from typing import Mapping, Optional

from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import SubInstruction
from motion_search_sdk.models.report import VerificationReport, VerifierWeights
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.trajectory import TrajectoryCandidate


class VerifierBackend(ABC):
    """Scores a rendered candidate for semantic alignment and the four physical laws"""

    name = "verifier"

    @abstractmethod
    def verify(self,
               sketch: VideoSketch,
               candidate: TrajectoryCandidate,
               sub: SubInstruction,
               scene: SceneBundle,
               weights: VerifierWeights,
               held_boxes: Optional[Mapping[str, BBox]] = None) -> VerificationReport:
        """
        Produce a full report for one candidate

        Args:
            sketch: Rendered sketch of the candidate
            candidate: The trajectory that was rendered
            sub: Sub-instruction the candidate answers
            scene: Scene the sketch was rendered from
            weights: Selection objective weights
            held_boxes: Current boxes of objects that are not moving
        """
