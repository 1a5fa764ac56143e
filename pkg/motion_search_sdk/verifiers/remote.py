"""
Remote verifier backed by a multimodal model.

One alignment query compares the first and last sketch frames; four physics
queries, one per law, see the whole frame sequence.
"""
from typing import List, Mapping, Optional

from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.models.files import ImageFile
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.message import Message
from motion_search_sdk.models.plan import SubInstruction
from motion_search_sdk.models.report import LAWS, LawScore, SemanticScore, VerificationReport, VerifierWeights
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.prompts import LAW_DESCRIPTIONS, law_example, render
from motion_search_sdk.transport.base import build_transport
from motion_search_sdk.transport.client import ModelClient
from motion_search_sdk.utils.logging_setup import get_logger
from motion_search_sdk.verifiers.base import VerifierBackend
from motion_search_sdk.verifiers.scoring import combine, parse_score_response

logger = get_logger(__name__)


def describe_goal(sub: SubInstruction) -> str:
    """Human-readable end goal for the alignment prompt"""
    if sub.goal.description:
        return sub.goal.description
    parts = []
    if sub.goal.goal_region is not None:
        region = ", ".join(f"{v:.3f}" for v in sub.goal.goal_region.to_list())
        parts.append(f"the moving objects end inside the region [{region}]")
    if sub.goal.direction is not None:
        dx, dy = sub.goal.direction
        parts.append(f"the net motion points along ({dx:.2f}, {dy:.2f})")
    return "; ".join(parts)


class RemoteVerifier(VerifierBackend):
    """Verifier that queries a remote model with the alignment and physics prompts"""

    name = "remote"

    def __init__(self, client: ModelClient):
        self.client = client

    def alignment(self, sketch: VideoSketch, sub: SubInstruction) -> SemanticScore:
        messages = [
            Message(role="system", text=render("alignment_system")),
            Message(
                role="user",
                text=render(
                    "alignment_user",
                    PHASE_NAME=f"phase {sub.index}",
                    PHASE_DESCRIPTION=sub.text,
                    END_GOAL=describe_goal(sub),
                ),
                images=[
                    ImageFile.from_array("first.png", sketch.frames[0]),
                    ImageFile.from_array("last.png", sketch.frames[-1]),
                ],
            ),
        ]
        score, explanation = self.client.complete_parsed(messages, parse_score_response)
        return SemanticScore(score=score, explanation=explanation)

    def physics(self, sketch: VideoSketch, law: str) -> LawScore:
        frames = [ImageFile.from_array(f"frame_{t:03d}.png", frame) for t, frame in enumerate(sketch.frames)]
        text = render("physics", LAW_DESCRIPTION=LAW_DESCRIPTIONS[law], LAW_EXAMPLE=law_example(law))
        messages = [Message(role="user", text=text, images=frames)]
        score, explanation = self.client.complete_parsed(messages, parse_score_response)
        return LawScore(law=law, score=score, explanation=explanation)

    def verify(self,
               sketch: VideoSketch,
               candidate: Optional[TrajectoryCandidate],
               sub: SubInstruction,
               scene: Optional[SceneBundle],
               weights: VerifierWeights,
               held_boxes: Optional[Mapping[str, BBox]] = None) -> VerificationReport:
        semantic = self.alignment(sketch, sub)
        laws: List[LawScore] = [self.physics(sketch, law) for law in LAWS]
        combined = combine(semantic.score, {law.law: law.score for law in laws}, weights)
        logger.debug(f"Remote verification of candidate {sketch.trajectory_ref}: combined {combined:.3f}")
        return VerificationReport(
            candidate_index=sketch.trajectory_ref,
            semantic=semantic,
            laws=laws,
            combined=combined,
            weights=weights,
        )


def remote_verifier(endpoint_config: EndpointConfig,
                    plugins: Optional[List[TransportPlugin]] = None) -> RemoteVerifier:
    """Build a remote verifier from an endpoint configuration"""
    client = ModelClient(
        build_transport(endpoint_config),
        model=endpoint_config.model,
        temperature=endpoint_config.temperature,
        plugins=plugins,
        max_retries=endpoint_config.max_retries,
    )
    return RemoteVerifier(client)


def remote_verify(sketch: VideoSketch,
                  sub: SubInstruction,
                  endpoint_config: EndpointConfig,
                  weights: Optional[VerifierWeights] = None,
                  plugins: Optional[List[TransportPlugin]] = None) -> VerificationReport:
    """Score one sketch with a remote model"""
    verifier = remote_verifier(endpoint_config, plugins)
    return verifier.verify(sketch, None, sub, None, weights or VerifierWeights())
