import pytest
import numpy as np

from motion_search_sdk.core.errors import EmptyCandidateSet, WeightError
from motion_search_sdk.core.search import Backends, build_feedback, sample_round, search_sub_instruction, select_best
from motion_search_sdk.harness.synthetic import OBJECT_ID, make_synthetic_scene
from motion_search_sdk.models.config import SearchConfig
from motion_search_sdk.models.report import LAWS, LawScore, SemanticScore, VerificationReport, VerifierWeights
from motion_search_sdk.models.trajectory import PlanningContext, TrajectoryCandidate
from motion_search_sdk.planners.base import PlannerBackend
from motion_search_sdk.planners.scripted import CLEAN_VARIANTS, ScriptedPlanner
from motion_search_sdk.verifiers.local import LocalVerifier

from conftest import SMALL_SCENE

PLANTED = ["teleport", "penetration", "straight", "hover", "size_drift"]


def _report(combined, index=0, worst="newton"):
    laws = [LawScore(law=law, score=0.2 if law == worst else 1.0, explanation=f"{law} note") for law in LAWS]
    return VerificationReport(candidate_index=index, semantic=SemanticScore(score=combined), laws=laws,
                              combined=combined)


def _context(scene):
    return PlanningContext(frame=scene.initial_frame, boxes=scene.initial_boxes(), prompt=scene.prompt)


class DuplicatePlanner(PlannerBackend):
    """Always proposes the same straight path"""

    def __init__(self):
        self.calls = []

    def propose_plan(self, prompt, scene):
        return scene.plan()

    def propose_trajectories(self, sub, context, scene, k, feedback=None, start_index=0):
        self.calls.append((k, start_index))
        box = context.boxes[OBJECT_ID]
        frames = [{OBJECT_ID: box} for _ in range(sub.frame_budget)]
        return [TrajectoryCandidate(candidate_index=start_index + i, frames=frames) for i in range(k)]


class TestSelectBest:
    def test_matches_linear_scan(self):
        """Test selection against a first-maximum scan on random lists with ties"""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(1, 10))
            scores = [float(s) for s in rng.choice([0.1, 0.5, 0.5, 0.9, 1.0], size=n)]
            expected = scores.index(max(scores))
            assert select_best([_report(s, i) for i, s in enumerate(scores)]) == expected

    def test_ties_go_to_earliest(self):
        assert select_best([_report(0.7), _report(0.9), _report(0.9)]) == 1

    def test_empty(self):
        with pytest.raises(EmptyCandidateSet):
            select_best([])


class TestSampleRound:
    def test_refill_stops_at_twice_k(self, scene):
        """Test that refilling after heavy filtering stops once 2K were drawn"""
        planner = DuplicatePlanner()
        sub = scene.plan().sub_instructions[0]
        drawn, survivors = sample_round(planner, sub, _context(scene), scene, SearchConfig(k=3), None, 0)
        assert len(drawn) == 6
        assert [c.candidate_index for c in drawn] == list(range(6))
        assert len(survivors) == 1
        assert planner.calls == [(3, 0), (2, 3), (1, 5)]

    def test_no_refill_when_diverse(self, scene):
        sub = scene.plan().sub_instructions[0]
        planner = ScriptedPlanner(planted=["straight", "hover", "teleport"])
        drawn, survivors = sample_round(planner, sub, _context(scene), scene, SearchConfig(k=3), None, 0)
        assert len(drawn) == 3
        assert survivors == drawn


class TestBuildFeedback:
    def test_summaries(self, scene):
        """Test that every failed candidate is summarized with its worst law"""
        sub = scene.plan().sub_instructions[0]
        candidates = ScriptedPlanner(planted=["hover", "teleport"]).propose_trajectories(
            sub, _context(scene), scene, 2)
        feedback = build_feedback(candidates, [_report(0.4, 0, "gravity"), _report(0.5, 1, "newton")], attempt=1)
        assert feedback.attempt == 1
        assert feedback.worst_laws() == ["gravity", "newton"]
        summary = feedback.rejected_summaries[0]
        assert summary.explanation == "gravity note"
        assert summary.start_boxes == candidates[0].frames[0]
        assert summary.end_boxes == candidates[0].frames[-1]


class TestSearchSubInstruction:
    def test_planted_ranking(self, scene):
        """Test that the clean candidate wins against planted violations"""
        sub = scene.plan().sub_instructions[0]
        config = SearchConfig(k=5, max_rounds=1, min_diversity=0.0)
        for seed in range(10):
            backends = Backends(ScriptedPlanner(seed=seed, planted=PLANTED), LocalVerifier())
            result = search_sub_instruction(sub, _context(scene), scene, backends, config)
            assert result.candidate.variant == "straight"
            assert result.report.combined == pytest.approx(1.0)
            assert not result.trace.below_threshold
            assert result.trace.rounds[0].accepted

    @pytest.mark.slow
    @pytest.mark.parametrize("planted", [PLANTED, PLANTED + ["perturbed"]])
    def test_planted_ranking_over_scenes(self, planted):
        """Test that a clean candidate wins in each of 50 seeded scenes"""
        config = SearchConfig(k=len(planted), max_rounds=1, min_diversity=0.0)
        for seed in range(50):
            scene = make_synthetic_scene(SMALL_SCENE.model_copy(update={"seed": seed}))
            sub = scene.plan().sub_instructions[0]
            backends = Backends(ScriptedPlanner(seed=seed, planted=planted), LocalVerifier())
            result = search_sub_instruction(sub, _context(scene), scene, backends, config)
            assert result.candidate.variant in CLEAN_VARIANTS, f"seed {seed}"
            assert result.report.combined == pytest.approx(1.0)
            assert not result.trace.below_threshold

    def test_below_threshold(self, scene):
        """Test that a search that never reaches tau returns its best candidate, flagged"""
        sub = scene.plan().sub_instructions[0]
        config = SearchConfig(k=3, tau=0.95, max_rounds=2, min_diversity=0.0)
        backends = Backends(ScriptedPlanner(planted=["hover"]), LocalVerifier())
        result = search_sub_instruction(sub, _context(scene), scene, backends, config)

        trace = result.trace
        assert trace.below_threshold
        assert len(trace.rounds) == 2
        assert trace.rounds[0].feedback is None
        assert trace.rounds[0].resample_reason is not None
        assert trace.rounds[1].feedback.attempt == 1
        assert trace.rounds[1].feedback.worst_laws() == ["gravity"] * 3
        # indices continue across rounds
        assert [c.candidate_index for c in trace.rounds[1].candidates] == [3, 4, 5]
        assert trace.selected_score == max(r.best_score for r in trace.rounds)
        assert result.report.combined < 0.95

    def test_filtered_candidates_recorded(self, scene):
        """Test that the round record lists candidates dropped for diversity"""
        sub = scene.plan().sub_instructions[0]
        backends = Backends(DuplicatePlanner(), LocalVerifier())
        result = search_sub_instruction(sub, _context(scene), scene, backends, SearchConfig(k=2, max_rounds=1))
        record = result.trace.rounds[0]
        assert record.drawn == 4
        assert record.filtered_out == [1, 2, 3]
        assert len(record.reports) == 1

    def test_sink_receives_every_verified_candidate(self, scene):
        sub = scene.plan().sub_instructions[0]
        seen = []
        backends = Backends(ScriptedPlanner(planted=PLANTED), LocalVerifier())
        config = SearchConfig(k=5, max_rounds=1, min_diversity=0.0)
        search_sub_instruction(sub, _context(scene), scene, backends, config,
                               sink=lambda s, r, c, sketch, report: seen.append((r, c.candidate_index)))
        assert seen == [(1, i) for i in range(5)]

    def test_parallel_matches_sequential(self, scene):
        """Test that verifying in a worker pool gives the same trace"""
        sub = scene.plan().sub_instructions[0]
        traces = []
        for workers in (1, 4):
            config = SearchConfig(k=4, max_rounds=2, tau=0.99, max_workers=workers)
            backends = Backends(ScriptedPlanner(seed=5, violation_rate=0.7), LocalVerifier())
            traces.append(search_sub_instruction(sub, _context(scene), scene, backends, config).trace)
        assert traces[0] == traces[1]

    def test_invalid_weights(self, scene):
        """Test that weights breaking their invariants raise WeightError"""
        sub = scene.plan().sub_instructions[0]
        config = SearchConfig(weights=VerifierWeights(sem=0.7, phys=0.7))
        backends = Backends(ScriptedPlanner(), LocalVerifier())
        with pytest.raises(WeightError):
            search_sub_instruction(sub, _context(scene), scene, backends, config)
