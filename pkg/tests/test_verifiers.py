import math

import pytest
import numpy as np

from motion_search_sdk.core.errors import ParseError, WeightError
from motion_search_sdk.models.config import VerifierThresholds
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import GoalSpec
from motion_search_sdk.models.report import LAWS, VerifierWeights
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.verifiers.local import (
    LocalVerifier,
    fall_coefficient,
    is_supported,
    overlap_fraction,
    unsupported_runs,
    verify_deformation,
    verify_gravity,
    verify_newton,
    verify_penetration,
    verify_semantic_local,
)
from motion_search_sdk.verifiers.scoring import combine, descriptive_score, parse_score_response

from conftest import blank_scene, candidate_from_centers, square_asset, sub_instruction


class TestSemantic:
    def test_end_in_region(self):
        """Test that ending inside the goal region scores 1.0"""
        goal = GoalSpec(goal_region=BBox.from_list([0.6, 0.4, 0.8, 0.6]))
        candidate = candidate_from_centers([(0.2, 0.5), (0.45, 0.5), (0.7, 0.5)])
        assert verify_semantic_local(None, candidate, goal).score == 1.0

    def test_opposite_direction(self):
        """Test that moving against the goal direction scores 0.0"""
        goal = GoalSpec(direction=(1.0, 0.0))
        candidate = candidate_from_centers([(0.7, 0.5), (0.5, 0.5), (0.3, 0.5)])
        assert verify_semantic_local(None, candidate, goal).score == pytest.approx(0.0)

    def test_distance_decay(self):
        """Test that the region term decays with distance to the region center"""
        goal = GoalSpec(goal_region=BBox.from_list([0.7, 0.7, 0.9, 0.9]))
        candidate = candidate_from_centers([(0.3, 0.3), (0.3, 0.3)])
        assert verify_semantic_local(None, candidate, goal).score == pytest.approx(1.0 - math.sqrt(0.5) / math.sqrt(2.0))

    def test_no_motion_direction_term(self):
        """Test that a stationary object gets the neutral direction term"""
        goal = GoalSpec(direction=(0.0, 1.0))
        candidate = candidate_from_centers([(0.5, 0.5)] * 3)
        assert verify_semantic_local(None, candidate, goal).score == 0.5


class TestNewton:
    def test_stationary(self):
        candidate = candidate_from_centers([(0.5, 0.5)] * 10)
        assert verify_newton(candidate).score == 1.0

    def test_constant_velocity(self):
        """Test that uniform motion has no acceleration"""
        candidate = candidate_from_centers([(0.1 + 0.05 * t, 0.5) for t in range(10)])
        assert verify_newton(candidate).score == 1.0

    def test_jump_is_capped(self):
        """Test that a single 0.4 jump caps the score at 0.3"""
        centers = [(0.2, 0.5)] * 5 + [(0.6, 0.5)] * 5
        law = verify_newton(candidate_from_centers(centers))
        assert law.score <= 0.3
        assert "teleportation" in law.explanation

    def test_short_candidate(self):
        """Test that fewer than three frames are not checked"""
        law = verify_newton(candidate_from_centers([(0.1, 0.5), (0.9, 0.5)]))
        assert law.score == 1.0
        assert "not checked" in law.explanation

    def test_acceleration_band(self):
        """Test the band between the acceptable and the zero acceleration"""
        # one velocity change of 0.06 between frames
        centers = [(0.1, 0.5), (0.12, 0.5), (0.14, 0.5), (0.22, 0.5), (0.30, 0.5)]
        law = verify_newton(candidate_from_centers(centers))
        assert law.score == pytest.approx((0.10 - 0.06) / (0.10 - 0.02))


class TestPenetration:
    def test_empty_mask(self):
        """Test that a scene without static pixels never penetrates"""
        candidate = candidate_from_centers([(0.3, 0.3), (0.6, 0.6)])
        assert verify_penetration(candidate, blank_scene()).score == 1.0

    def test_fully_inside(self):
        """Test that a box inside an obstacle scores 0.0"""
        mask = np.zeros((100, 100), dtype=bool)
        mask[40:80, 40:80] = True
        candidate = candidate_from_centers([(0.2, 0.2), (0.6, 0.6)])
        law = verify_penetration(candidate, blank_scene(static_mask=mask))
        assert law.score == 0.0
        assert "frame 1" in law.explanation

    def test_partial_overlap(self):
        """Test that an overlap of 0.275 maps to 0.5"""
        mask = np.zeros((100, 100), dtype=bool)
        mask[10:21, 10:50] = True
        box = BBox.from_list([0.1, 0.1, 0.5, 0.5])
        assert overlap_fraction(box, mask) == pytest.approx(0.275)
        candidate = TrajectoryCandidate(candidate_index=0, frames=[{"a": box}])
        assert verify_penetration(candidate, blank_scene(static_mask=mask)).score == pytest.approx(0.5)

    def test_overlap_matches_pixel_count(self):
        """Test that overlap fractions equal a per-pixel count"""
        rng = np.random.default_rng(11)
        for _ in range(100):
            mask = rng.random((40, 60)) < rng.uniform(0.05, 0.6)
            x0, y0 = rng.uniform(0.0, 0.7, size=2)
            box = BBox(x_min=x0, y_min=y0, x_max=x0 + rng.uniform(0.05, 0.3), y_max=y0 + rng.uniform(0.05, 0.3))
            px0, py0, px1, py1 = box.pixel_rect(60, 40)
            hits = sum(1 for y in range(py0, py1) for x in range(px0, px1) if mask[y, x])
            assert overlap_fraction(box, mask) == hits / ((px1 - px0) * (py1 - py0))


class TestGravity:
    def test_resting_on_ground(self):
        """Test that an object on the ground line is supported"""
        candidate = candidate_from_centers([(0.2 + 0.02 * t, 0.75) for t in range(10)], size=(0.1, 0.1))
        assert verify_gravity(candidate, blank_scene(ground_line=0.8)).score == 1.0

    def test_quadratic_fit(self):
        """Test that the fit recovers a planted coefficient"""
        for a in (0.001, 0.002, 0.0137):
            ys = np.array([0.2 + 0.01 * t + a * t * t for t in range(12)])
            assert fall_coefficient(ys) == pytest.approx(a, abs=1e-6)

    def test_falling_arc(self):
        """Test that an accelerating fall is plausible"""
        candidate = candidate_from_centers([(0.5, 0.2 + 0.002 * t * t) for t in range(10)])
        assert verify_gravity(candidate, blank_scene()).score == 1.0

    def test_hover(self):
        """Test that staying in mid-air for ten frames is a violation"""
        law = verify_gravity(candidate_from_centers([(0.5, 0.3)] * 10), blank_scene())
        assert law.score == 0.2
        assert "hovers" in law.explanation

    def test_rising_without_support(self):
        """Test that drifting upward while unsupported is a violation"""
        law = verify_gravity(candidate_from_centers([(0.5, 0.6 - 0.01 * t) for t in range(8)]), blank_scene())
        assert law.score == 0.2

    def test_short_run_is_ignored(self):
        """Test that runs shorter than three frames do not count"""
        centers = [(0.5, 0.85)] * 4 + [(0.5, 0.6)] * 2 + [(0.5, 0.85)] * 4
        assert verify_gravity(candidate_from_centers(centers), blank_scene(ground_line=0.9)).score == 1.0

    @pytest.mark.slow
    def test_all_hovers_are_flagged(self):
        """Test that every hover of at least five frames is caught, at every start and length in 41 frames"""
        T = 41
        scene = blank_scene(ground_line=0.9)
        for height in (0.25, 0.55):
            for start in range(T - 4):
                for length in range(5, T - start + 1):
                    centers = [(0.3, 0.85)] * T
                    centers[start:start + length] = [(0.3, height)] * length
                    law = verify_gravity(candidate_from_centers(centers), scene)
                    assert law.score == 0.2, f"hover at {start} for {length} frames"
                    assert "hovers" in law.explanation

    def test_supported_by_static_pixels(self):
        """Test that a box resting on an obstacle is supported"""
        mask = np.zeros((100, 100), dtype=bool)
        mask[50:60, 30:70] = True
        box = BBox.from_list([0.4, 0.4, 0.5, 0.5])
        assert is_supported(box, blank_scene(static_mask=mask), [])

    def test_supported_by_stacked_object(self):
        """Test that a box resting on another object's top is supported"""
        below = BBox.from_list([0.3, 0.5, 0.6, 0.6])
        box = BBox.from_list([0.4, 0.4, 0.5, 0.5])
        assert is_supported(box, blank_scene(), [below])
        assert not is_supported(box, blank_scene(), [])

    def test_held_object_supports(self):
        """Test that a non-moving object supports a moving one"""
        table = BBox.from_list([0.3, 0.5, 0.7, 0.9])
        scene = blank_scene(objects=[square_asset("table", table)])
        candidate = candidate_from_centers([(0.4 + 0.01 * t, 0.45) for t in range(10)], object_id="cup")
        assert verify_gravity(candidate, scene).score == 1.0

    def test_unsupported_runs(self):
        assert unsupported_runs([True, False, False, True, False]) == [(1, 3), (4, 5)]
        assert unsupported_runs([True, True]) == []


class TestDeformation:
    def test_constant_size(self):
        candidate = candidate_from_centers([(0.2 + 0.05 * t, 0.5) for t in range(5)])
        assert verify_deformation(candidate).score == 1.0

    def test_width_doubles(self):
        """Test that doubling the width scores 0.0"""
        frames = [{"a": BBox.from_list([0.2, 0.4, 0.3, 0.5])}, {"a": BBox.from_list([0.2, 0.4, 0.4, 0.5])}]
        assert verify_deformation(TrajectoryCandidate(candidate_index=0, frames=frames)).score == 0.0

    def test_partial_drift(self):
        """Test that a drift of 0.275 maps to 0.5"""
        frames = [{"a": BBox.from_list([0.2, 0.4, 0.4, 0.5])}, {"a": BBox.from_list([0.2, 0.4, 0.455, 0.5])}]
        assert verify_deformation(TrajectoryCandidate(candidate_index=0, frames=frames)).score == pytest.approx(0.5)

    def test_resizable_objects_are_skipped(self):
        """Test that resizable objects may change size"""
        box = BBox.from_list([0.2, 0.4, 0.3, 0.5])
        scene = blank_scene(objects=[square_asset("a", box, resizable=True)])
        frames = [{"a": box}, {"a": BBox.from_list([0.2, 0.4, 0.4, 0.5])}]
        assert verify_deformation(TrajectoryCandidate(candidate_index=0, frames=frames), scene).score == 1.0


class TestCombine:
    def test_perfect_scores(self):
        assert combine(1.0, {law: 1.0 for law in LAWS}, VerifierWeights()) == 1.0

    def test_weighted_sum(self):
        laws = {"newton": 1.0, "penetration": 0.0, "gravity": 0.5, "deformation": 1.0}
        assert combine(0.8, laws, VerifierWeights()) == pytest.approx(0.5 * 0.8 + 0.5 * 0.625)

    def test_invalid_weights(self):
        with pytest.raises(WeightError):
            combine(1.0, {law: 1.0 for law in LAWS}, VerifierWeights(sem=0.9, phys=0.9))

    @pytest.mark.slow
    def test_range_and_monotonicity(self):
        """Test that over 10^5 draws combined scores stay in [0, 1] and never drop when a component rises"""
        rng = np.random.default_rng(3)
        for _ in range(1000):
            sem = float(rng.uniform())
            raw = rng.dirichlet(np.ones(len(LAWS)))
            weights = VerifierWeights(sem=sem, phys=1.0 - sem, laws={law: float(w) for law, w in zip(LAWS, raw)})
            weights.laws[LAWS[-1]] = 1.0 - sum(weights.laws[law] for law in LAWS[:-1])
            for law_scores, semantic, bump, raised_law in zip(rng.uniform(size=(100, len(LAWS))),
                                                              rng.uniform(size=100),
                                                              rng.uniform(0.0, 0.5, size=100),
                                                              rng.integers(len(LAWS), size=100)):
                scores = {law: float(s) for law, s in zip(LAWS, law_scores)}
                semantic = float(semantic)
                base = combine(semantic, scores, weights)
                assert 0.0 <= base <= 1.0
                law = LAWS[int(raised_law)]
                raised = dict(scores, **{law: min(1.0, scores[law] + float(bump))})
                assert combine(semantic, raised, weights) >= base - 1e-12
                assert combine(min(1.0, semantic + 0.1), scores, weights) >= base - 1e-12


class TestScoreParsing:
    def test_json_score(self):
        assert parse_score_response('{"score": 0.8, "explanation": "fine"}') == (0.8, "fine")

    def test_fenced_score(self):
        text = "```json\n{\"score\": \"0.35\", \"explanation\": \"hovers\"}\n```"
        assert parse_score_response(text) == (0.35, "hovers")

    def test_descriptive_score(self):
        """Test that a descriptive verdict maps to its score"""
        assert descriptive_score("The motion is very inconsistent with gravity") == 0.1
        assert descriptive_score("Somewhat consistent overall") == 0.8
        assert parse_score_response('{"score": "somewhat inconsistent"}')[0] == 0.7

    def test_out_of_range_is_clamped(self):
        assert parse_score_response('{"score": 7}')[0] == 1.0

    def test_bare_score_line(self):
        assert parse_score_response("Score: 0.45\nThe object floats.")[0] == 0.45

    def test_unparsable(self):
        with pytest.raises(ParseError):
            parse_score_response("I am not sure what to say.")


class TestLocalVerifier:
    def test_full_report(self, scene):
        """Test that a report carries every law and the weighted combination"""
        sub = scene.plan().sub_instructions[0]
        box = scene.initial_boxes()["obj_0"]
        start, end = np.array(box.center()), np.array(sub.goal.goal_region.center())
        frames = [{"obj_0": BBox.from_center(tuple(start + (end - start) * t / 40), box.width, box.height)}
                  for t in range(41)]
        candidate = TrajectoryCandidate(candidate_index=7, frames=frames)
        report = LocalVerifier().verify(None, candidate, sub, scene, VerifierWeights())
        assert report.candidate_index == 7
        assert sorted(report.law_scores()) == sorted(LAWS)
        assert report.combined == pytest.approx(1.0)

    def test_thresholds_are_used(self):
        """Test that custom thresholds change the verdict"""
        candidate = candidate_from_centers([(0.1 + 0.05 * t, 0.5) for t in range(5)])
        strict = VerifierThresholds(jump=0.01, jump_cap=0.1)
        scene = blank_scene(ground_line=0.56)
        report = LocalVerifier(strict).verify(None, candidate, sub_instruction(frame_budget=5), scene, VerifierWeights())
        assert report.law("newton").score == 0.1
        assert report.worst_law().law == "newton"
