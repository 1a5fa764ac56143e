"""
Test-time search over trajectory candidates for one sub-instruction.
"""
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from motion_search_sdk.core.errors import EmptyCandidateSet
from motion_search_sdk.models.config import SearchConfig
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import SubInstruction
from motion_search_sdk.models.report import VerificationReport
from motion_search_sdk.models.scene import SceneBundle
from motion_search_sdk.models.sketch import VideoSketch
from motion_search_sdk.models.trajectory import PlannerFeedback, PlanningContext, RejectedSummary, TrajectoryCandidate
from motion_search_sdk.planners.base import PlannerBackend
from motion_search_sdk.planners.diversity import diversity_filter
from motion_search_sdk.rendering.renderer import render_sketch
from motion_search_sdk.utils.images import digest, encode_png
from motion_search_sdk.utils.logging_setup import get_logger
from motion_search_sdk.verifiers.base import VerifierBackend

logger = get_logger(__name__)

# Called for every verified candidate: (sub, round, candidate, sketch, report)
CandidateSink = Callable[[SubInstruction, int, TrajectoryCandidate, VideoSketch, VerificationReport], None]


@dataclass
class Backends:
    """The planner and verifier a search runs with"""
    planner: PlannerBackend
    verifier: VerifierBackend


class RoundRecord(BaseModel):
    """One sample-filter-render-verify-select round"""
    round: int
    drawn: int
    candidates: List[TrajectoryCandidate]
    filtered_out: List[int] = Field(default_factory=list)
    reports: List[VerificationReport]
    selected_index: int
    best_score: float
    accepted: bool
    resample_reason: Optional[str] = None
    feedback: Optional[PlannerFeedback] = None


class SubInstructionTrace(BaseModel):
    """Audit record of the search for one sub-instruction"""
    sub_index: int
    text: str
    context_frame_sha256: str
    context_boxes: Dict[str, BBox]
    rounds: List[RoundRecord] = Field(default_factory=list)
    selected_index: int = -1
    selected_score: float = 0.0
    below_threshold: bool = False


@dataclass
class SearchResult:
    """Selected candidate of one sub-instruction with its sketch and report"""
    candidate: TrajectoryCandidate
    sketch: VideoSketch
    report: VerificationReport
    trace: SubInstructionTrace
    timings: Dict[str, float] = field(default_factory=dict)


def select_best(reports: Sequence[VerificationReport]) -> int:
    """
    Position of the report with the highest combined score

    Ties go to the earliest position.

    Raises:
        EmptyCandidateSet: when ``reports`` is empty
    """
    if not reports:
        raise EmptyCandidateSet("Cannot select from an empty candidate set")
    best = 0
    for position in range(1, len(reports)):
        if reports[position].combined > reports[best].combined:
            best = position
    return best


def sample_round(planner: PlannerBackend,
                 sub: SubInstruction,
                 context: PlanningContext,
                 scene: SceneBundle,
                 config: SearchConfig,
                 feedback: Optional[PlannerFeedback],
                 start_index: int) -> Tuple[List[TrajectoryCandidate], List[TrajectoryCandidate]]:
    """
    Draw K candidates, drop near-duplicates and refill

    Refilling continues the candidate indices and stops once K candidates
    survive or 2K have been drawn.

    Returns:
        (all drawn candidates, surviving candidates)
    """
    k = config.k
    drawn = planner.propose_trajectories(sub, context, scene, k, feedback, start_index)
    survivors = diversity_filter(drawn, config.min_diversity)
    while len(survivors) < k and len(drawn) < 2 * k:
        need = min(k - len(survivors), 2 * k - len(drawn))
        drawn += planner.propose_trajectories(sub, context, scene, need, feedback, start_index + len(drawn))
        survivors = diversity_filter(drawn, config.min_diversity)
    return drawn, survivors[:k]


def build_feedback(candidates: Sequence[TrajectoryCandidate],
                   reports: Sequence[VerificationReport],
                   attempt: int) -> PlannerFeedback:
    """Summarize why every candidate of a failed round fell short"""
    summaries = []
    for candidate, report in zip(candidates, reports):
        worst = report.worst_law()
        summaries.append(
            RejectedSummary(
                candidate_index=candidate.candidate_index,
                combined_score=report.combined,
                worst_law=worst.law,
                explanation=worst.explanation,
                start_boxes=dict(candidate.frames[0]),
                end_boxes=dict(candidate.frames[-1]),
            )
        )
    return PlannerFeedback(rejected_summaries=summaries, attempt=attempt)


def search_sub_instruction(sub: SubInstruction,
                           context: PlanningContext,
                           scene: SceneBundle,
                           backends: Backends,
                           config: SearchConfig,
                           sink: Optional[CandidateSink] = None) -> SearchResult:
    """
    Search for the best trajectory of one sub-instruction

    Each round samples K candidates, filters them for diversity, renders and
    verifies them and selects the best. A round whose best combined score
    reaches tau ends the search; otherwise feedback about the failures goes
    into the next round. When every round falls short, the best candidate
    seen is returned and the trace is flagged ``below_threshold``.

    Args:
        sub: The sub-instruction
        context: Context frame and current boxes
        scene: The scene bundle
        backends: Planner and verifier
        config: Search parameters
        sink: Receives every verified candidate, e.g. to write artefacts

    Returns:
        SearchResult: selected candidate, its sketch, report and the trace
    """
    config.weights.check()
    held = {object_id: box for object_id, box in context.boxes.items() if object_id not in sub.moving_ids}
    trace = SubInstructionTrace(
        sub_index=sub.index,
        text=sub.text,
        context_frame_sha256=digest(encode_png(context.frame)),
        context_boxes=dict(context.boxes),
    )
    timings = {"sample": 0.0, "render_verify": 0.0}

    def evaluate(candidate: TrajectoryCandidate) -> Tuple[VideoSketch, VerificationReport]:
        sketch = render_sketch(candidate, scene, held, fps=config.sketch_fps)
        report = backends.verifier.verify(sketch, candidate, sub, scene, config.weights, held)
        return sketch, report

    best: Optional[Tuple[TrajectoryCandidate, VideoSketch, VerificationReport]] = None
    feedback: Optional[PlannerFeedback] = None
    next_index = 0
    for round_number in range(1, config.max_rounds + 1):
        started = time.perf_counter()
        drawn, survivors = sample_round(backends.planner, sub, context, scene, config, feedback, next_index)
        timings["sample"] += time.perf_counter() - started
        next_index += len(drawn)
        if not survivors:
            raise EmptyCandidateSet(f"Planner returned no candidates for sub-instruction {sub.index}")

        started = time.perf_counter()
        if config.max_workers > 1 and len(survivors) > 1:
            with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
                results = list(pool.map(evaluate, survivors))
        else:
            results = [evaluate(candidate) for candidate in survivors]
        timings["render_verify"] += time.perf_counter() - started

        reports = [report for _, report in results]
        if sink is not None:
            for candidate, (sketch, report) in zip(survivors, results):
                sink(sub, round_number, candidate, sketch, report)

        position = select_best(reports)
        chosen, (chosen_sketch, chosen_report) = survivors[position], results[position]
        accepted = chosen_report.combined >= config.tau
        kept = {candidate.candidate_index for candidate in survivors}
        record = RoundRecord(
            round=round_number,
            drawn=len(drawn),
            candidates=drawn,
            filtered_out=[c.candidate_index for c in drawn if c.candidate_index not in kept],
            reports=reports,
            selected_index=chosen.candidate_index,
            best_score=chosen_report.combined,
            accepted=accepted,
            feedback=feedback,
        )
        trace.rounds.append(record)
        logger.info(
            f"Sub-instruction {sub.index}, round {round_number}: best candidate {chosen.candidate_index} "
            f"scored {chosen_report.combined:.3f} (tau {config.tau})"
        )

        if best is None or chosen_report.combined > best[2].combined:
            best = (chosen, chosen_sketch, chosen_report)
        if accepted:
            break

        record.resample_reason = (
            f"best combined score {chosen_report.combined:.3f} below tau {config.tau}; "
            f"worst law {chosen_report.worst_law().law}"
        )
        feedback = build_feedback(survivors, reports, attempt=round_number)
    else:
        trace.below_threshold = True
        logger.warning(
            f"Sub-instruction {sub.index} stayed below tau after {config.max_rounds} round(s); "
            f"using best candidate {best[0].candidate_index} ({best[2].combined:.3f})"
        )

    trace.selected_index = best[0].candidate_index
    trace.selected_score = best[2].combined
    return SearchResult(candidate=best[0], sketch=best[1], report=best[2], trace=trace, timings=timings)
