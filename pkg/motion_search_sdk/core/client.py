"""
Main client for the Motion Search SDK.
"""
import os
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pydantic import ValidationError

from motion_search_sdk.core.errors import EXIT_BEST_EFFORT, EXIT_OK, ConfigError, IoError, ParseError, SchemaError
from motion_search_sdk.core.pipeline import PipelineResult, run_pipeline
from motion_search_sdk.core.search import Backends
from motion_search_sdk.export.generator import JobHandle, generator_client_stub
from motion_search_sdk.export.track import (
    export_tracks,
    read_selected_plan,
    write_selected_plan,
    write_track_file,
)
from motion_search_sdk.models.config import EndpointConfig, RunConfig, VerifierSelection
from motion_search_sdk.models.plan import SubInstruction
from motion_search_sdk.models.report import VerificationReport, VerifierWeights
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.track import DEFAULT_TRACK_FPS, DEFAULT_TRACK_FRAMES, TrackFileMeta
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.planners.base import PlannerBackend
from motion_search_sdk.planners.parsing import parse_trajectory_response, serialize_plan
from motion_search_sdk.planners.remote import remote_planner
from motion_search_sdk.planners.scripted import ScriptedPlanner
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.rendering.renderer import encode_sketch, read_sketch, render_sketch
from motion_search_sdk.scene.bundle import load_scene_bundle
from motion_search_sdk.utils.files import write_json, write_text
from motion_search_sdk.utils.logging_setup import configure_logging, get_logger
from motion_search_sdk.utils.trace_processing import TRACE_LEVELS, process_search_trace
from motion_search_sdk.verifiers.base import VerifierBackend
from motion_search_sdk.verifiers.local import LocalVerifier
from motion_search_sdk.verifiers.remote import remote_verifier

logger = get_logger(__name__)

CANDIDATE_FILE = "candidate.json"
REPORT_FILE = "report.json"


@dataclass
class RunResult:
    """What a ``run`` produced on disk"""
    run_dir: str
    pipeline: PipelineResult
    track_path: str
    exit_code: int
    job: Optional[JobHandle] = None
    timings: Dict[str, float] = field(default_factory=dict)


class Client:
    """Client for planning, verifying and exporting object motion"""

    def __init__(self,
                 verbosity: str = "normal",
                 trace_level: str = "none",
                 plugins: Optional[List[TransportPlugin]] = None):
        """
        Initialize the client

        Args:
            verbosity: Logging verbosity (default: "normal")
                Options: "quiet", "normal", "verbose", "debug"
            trace_level: Search trace level (default: "none")
                Options: "none", "minimal", "standard", "detailed", "raw"
                The "raw" level dumps the complete trace as JSON
            plugins: Plugins applied to every remote model call
        """
        self.verbosity = verbosity.lower()
        configure_logging(self.verbosity)
        self.trace_level = trace_level.lower()
        if self.trace_level not in TRACE_LEVELS:
            raise ConfigError(f"Unknown trace level '{trace_level}'. Options: {', '.join(TRACE_LEVELS)}",
                              field="trace_level")
        self.plugins = list(plugins or [])
        logger.info(f"Initialized Motion Search client (verbosity: {self.verbosity}, trace level: {self.trace_level})")

    def add_plugin(self, plugin: TransportPlugin) -> None:
        self.plugins.append(plugin)

    def build_planner(self, config: RunConfig) -> PlannerBackend:
        selection = config.planner
        if selection.kind == "scripted":
            return ScriptedPlanner(seed=selection.seed, planted=selection.planted,
                                   violation_rate=selection.violation_rate)
        return remote_planner(config.endpoint("PLANNER"), self.plugins)

    def build_verifier(self, config: RunConfig) -> VerifierBackend:
        return self._verifier(config.verifier, lambda: config.endpoint("VERIFIER"))

    def _verifier(self, selection: VerifierSelection, endpoint) -> VerifierBackend:
        if selection.kind == "local":
            return LocalVerifier(selection.thresholds)
        return remote_verifier(endpoint(), self.plugins)

    def build_backends(self, config: RunConfig) -> Backends:
        """Exactly one planner and one verifier, as the config selects"""
        return Backends(planner=self.build_planner(config), verifier=self.build_verifier(config))

    def run(self, config: RunConfig) -> RunResult:
        """
        Plan, search, and export one prompt

        Writes ``<output_dir>/<run_id>/`` with ``plan.json``, one directory per
        verified candidate (``phase_i/candidate_k/{frames/, candidate.json,
        report.json}``), the selected sketches and plan under ``selected/``,
        ``track.json``, ``trace.json`` and ``timing.json``.

        Args:
            config: The run configuration

        Returns:
            RunResult: paths and the pipeline result; ``exit_code`` is the
                best-effort status when a sub-instruction stayed below tau
        """
        started = time.perf_counter()
        scene = load_scene_bundle(config.scene)
        prompt = config.prompt or scene.prompt
        if not prompt:
            raise ConfigError("No prompt given and the scene manifest has none", field="prompt")
        run_id = config.run_id or time.strftime("%Y%m%d-%H%M%S")
        run_dir = os.path.join(config.output_dir, run_id)
        backends = self.build_backends(config)
        logger.info(f"Run {run_id}: planner '{backends.planner.name}', verifier '{backends.verifier.name}', "
                    f"K={config.search.k}, tau={config.search.tau}, rounds={config.search.max_rounds}")

        def sink(sub: SubInstruction, round_number: int, candidate: TrajectoryCandidate,
                 sketch: VideoSketch, report: VerificationReport) -> None:
            directory = os.path.join(run_dir, f"phase_{sub.index}", f"candidate_{candidate.candidate_index}")
            encode_sketch(sketch, os.path.join(directory, "frames"))
            write_json(os.path.join(directory, CANDIDATE_FILE), candidate.model_dump(mode="json"))
            write_json(os.path.join(directory, REPORT_FILE), report.model_dump(mode="json"))
            if self.verbosity in ("verbose", "debug"):
                logger.info(f"  phase {sub.index} round {round_number} candidate {candidate.candidate_index}: "
                            f"combined {report.combined:.3f}")

        try:
            result = run_pipeline(prompt, scene, backends, config.search, sink)
        except Exception as e:
            partial = getattr(e, "partial_trace", None)
            if partial is not None:
                write_json(os.path.join(run_dir, "trace.json"), partial.model_dump(mode="json"))
                process_search_trace(partial, self.trace_level)
            raise

        write_text(os.path.join(run_dir, "plan.json"), serialize_plan(result.plan))
        self._write_selected(run_dir, result, scene, config)

        meta = TrackFileMeta(fps=config.track_fps, width=scene.width, height=scene.height, prompt=prompt)
        tracks = export_tracks(result.selected, config.track_frames, scene.initial_boxes())
        track_path = write_track_file(tracks, os.path.join(run_dir, "track.json"), meta)
        write_json(os.path.join(run_dir, "trace.json"), result.trace.model_dump(mode="json"))

        job = None
        if config.generator.enabled:
            endpoint = config.endpoint("GENERATOR") if config.generator.endpoint or not config.generator.dry_run else None
            job = generator_client_stub(track_path, endpoint, scene.initial_frame,
                                        dry_run=config.generator.dry_run, out_dir=run_dir)

        timings = dict(result.timings)
        timings["total"] = time.perf_counter() - started
        write_json(os.path.join(run_dir, "timing.json"), {k: round(v, 3) for k, v in timings.items()})

        for sub, report in zip(result.plan.sub_instructions, result.reports):
            logger.info(f"Sub-instruction {sub.index} ({sub.text}): combined score {report.combined:.3f}")
        logger.info("Stage times: " + ", ".join(f"{k} {v:.2f}s" for k, v in timings.items()))
        process_search_trace(result.trace, self.trace_level)

        exit_code = EXIT_BEST_EFFORT if result.below_threshold else EXIT_OK
        if exit_code == EXIT_BEST_EFFORT:
            logger.warning("At least one sub-instruction stayed below tau; outputs are best effort")
        return RunResult(run_dir=run_dir, pipeline=result, track_path=track_path, exit_code=exit_code,
                         job=job, timings=timings)

    def _write_selected(self, run_dir: str, result: PipelineResult, scene: SceneBundle, config: RunConfig) -> None:
        selected_dir = os.path.join(run_dir, "selected")
        sketch_format = "gif" if config.write_gif else "png_sequence"
        for sub, sketch in zip(result.plan.sub_instructions, result.sketches):
            encode_sketch(sketch, os.path.join(selected_dir, f"phase_{sub.index}"), sketch_format)
        meta = TrackFileMeta(width=scene.width, height=scene.height, prompt=result.trace.prompt)
        write_selected_plan(
            os.path.join(selected_dir, "plan.json"),
            result.selected,
            [sub.text for sub in result.plan.sub_instructions],
            scene.initial_boxes(),
            meta,
        )

    def verify_only(self,
                    path: str,
                    scene_path: str,
                    phase: int = 1,
                    selection: Optional[VerifierSelection] = None,
                    weights: Optional[VerifierWeights] = None) -> VerificationReport:
        """
        Score one candidate file or sketch directory without searching

        A directory must hold ``frame_*.png`` files; its ``candidate.json``
        (as written by ``run``) supplies the boxes the deterministic verifier
        needs. A file is read as a candidate document or a planner reply.

        Raises:
            ParseError: when the inputs cannot be parsed
        """
        scene = load_scene_bundle(scene_path)
        plan = scene.plan() or ScriptedPlanner().propose_plan(scene.prompt, scene)
        subs = {sub.index: sub for sub in plan.sub_instructions}
        if phase not in subs:
            raise ConfigError(f"Scene plan has no phase {phase}", field="phase")
        sub = subs[phase]
        selection = selection or VerifierSelection()
        verifier = self._verifier(selection, lambda: EndpointConfig.from_env("VERIFIER", **(selection.endpoint or {})))

        candidate: Optional[TrajectoryCandidate] = None
        sketch: Optional[VideoSketch] = None
        if os.path.isdir(path):
            frames_dir = os.path.join(path, "frames")
            try:
                sketch = read_sketch(frames_dir if os.path.isdir(frames_dir) else path)
            except IoError as e:
                raise ParseError(f"No sketch frames in {path}") from e
            nearby = (os.path.join(path, CANDIDATE_FILE),
                      os.path.join(os.path.dirname(os.path.normpath(path)), CANDIDATE_FILE))
            candidate_path = next((p for p in nearby if os.path.isfile(p)), None)
            if candidate_path is not None:
                candidate = load_candidate(candidate_path, sub, scene)
            elif selection.kind == "local":
                raise ParseError(f"No {CANDIDATE_FILE} with {path}; the local verifier needs candidate boxes")
        else:
            candidate = load_candidate(path, sub, scene)

        moving = candidate.object_ids() if candidate is not None else []
        held = {object_id: box for object_id, box in scene.initial_boxes().items() if object_id not in moving}
        if sketch is None:
            sketch = render_sketch(candidate, scene, held)
        elif candidate is not None:
            sketch = VideoSketch(frames=sketch.frames, trajectory_ref=candidate.candidate_index, fps=sketch.fps)
        return verifier.verify(sketch, candidate, sub, scene, weights or VerifierWeights(), held)

    def export(self,
               run_dir: str,
               frames: int = DEFAULT_TRACK_FRAMES,
               fps: float = DEFAULT_TRACK_FPS,
               out: Optional[str] = None) -> str:
        """Rebuild the dense track of a finished run from ``selected/plan.json``"""
        selected, initial_boxes, meta = read_selected_plan(os.path.join(run_dir, "selected", "plan.json"))
        tracks = export_tracks(selected, frames, initial_boxes)
        return write_track_file(tracks, out or os.path.join(run_dir, "track.json"), meta.model_copy(update={"fps": fps}))


def load_candidate(path: str, sub: SubInstruction, scene: SceneBundle) -> TrajectoryCandidate:
    """
    Read a candidate document, or a planner reply in any accepted format

    Raises:
        ParseError: when neither reading succeeds
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ParseError(f"Could not read candidate {path}: {e}") from e
    try:
        return TrajectoryCandidate.model_validate_json(text)
    except ValidationError:
        pass
    names = {asset.label: asset.id for asset in scene.objects}
    names.update({object_id: object_id for object_id in scene.object_ids()})
    try:
        return parse_trajectory_response(text, sub, 0, names)[0]
    except SchemaError as e:
        raise ParseError(f"Candidate {path} could not be parsed: {e}") from e

