"""
Motion Search SDK

Plans object motion for a text prompt over a segmented scene: a planner
decomposes the prompt and samples bounding-box trajectories, each candidate is
rendered into a cheap video sketch, a verifier scores it for semantic
alignment and physical plausibility, and the best trajectories are exported
as dense tracks for a trajectory-conditioned video generator.
"""

from motion_search_sdk.core.client import Client, RunResult
from motion_search_sdk.core.pipeline import PipelineResult, SearchTrace, run_pipeline
from motion_search_sdk.core.search import Backends, search_sub_instruction, select_best
from motion_search_sdk.export.generator import GeneratorClient, generator_client_stub
from motion_search_sdk.export.track import concat_plan, interpolate_dense, read_track_file, write_track_file
from motion_search_sdk.models.config import RunConfig, SearchConfig, SyntheticSceneSpec, VerifierThresholds
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import GoalSpec, HighLevelPlan, SubInstruction
from motion_search_sdk.models.report import VerificationReport, VerifierWeights
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.planners.remote import RemotePlanner
from motion_search_sdk.planners.scripted import ScriptedPlanner
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.plugins.few_shot import FewShotPlugin
from motion_search_sdk.rendering.renderer import encode_sketch, render_sketch
from motion_search_sdk.scene.bundle import load_scene_bundle, save_scene_bundle
from motion_search_sdk.verifiers.local import LocalVerifier
from motion_search_sdk.verifiers.remote import RemoteVerifier

__version__ = "0.1.0"

__all__ = [
    "Client",
    "RunResult",
    "PipelineResult",
    "SearchTrace",
    "run_pipeline",
    "Backends",
    "search_sub_instruction",
    "select_best",
    "GeneratorClient",
    "generator_client_stub",
    "concat_plan",
    "interpolate_dense",
    "read_track_file",
    "write_track_file",
    "RunConfig",
    "SearchConfig",
    "SyntheticSceneSpec",
    "VerifierThresholds",
    "BBox",
    "GoalSpec",
    "HighLevelPlan",
    "SubInstruction",
    "VerificationReport",
    "VerifierWeights",
    "TrajectoryCandidate",
    "RemotePlanner",
    "ScriptedPlanner",
    "TransportPlugin",
    "FewShotPlugin",
    "encode_sketch",
    "render_sketch",
    "load_scene_bundle",
    "save_scene_bundle",
    "LocalVerifier",
    "RemoteVerifier",
]
