import json

import pytest

from motion_search_sdk.core.errors import SchemaError
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.planners.parsing import (
    PlanDocument,
    parse_box,
    parse_plan_response,
    parse_trajectory_response,
    serialize_plan,
)
from motion_search_sdk.utils.json_text import find_json, format_loc, strip_fences

from conftest import sub_instruction

KNOWN = {"obj_0": "obj_0", "box": "obj_0", "table": "table"}


def _phase(**overrides):
    phase = {
        "action": "the box slides right",
        "duration": 41,
        "object_ids": ["box"],
        "goal": {"region": [0.6, 0.6, 0.8, 0.8], "direction": "right", "description": "box at the right"},
    }
    phase.update(overrides)
    return phase


def _plan(**overrides):
    plan = {"total_frames": 41, "phases": [_phase()], "static_objects": ["table"]}
    plan.update(overrides)
    return json.dumps(plan)


def _with_goal(**goal):
    base = {"region": [0.6, 0.6, 0.8, 0.8], "direction": "right"}
    base.update(goal)
    return _plan(phases=[_phase(goal=base)])


def _without(key):
    phase = _phase()
    del phase[key]
    return _plan(phases=[phase])


MALFORMED_PLANS = [
    ("not json at all", "bad_type"),
    ("[1, 2, 3]", "bad_type"),
    ("{}", "missing_field"),
    (json.dumps({"phases": "one"}), "bad_type"),
    (_plan(phases=[]), "M_out_of_range"),
    (_plan(phases=[_phase(duration=d) for d in (8, 8, 8, 8, 9)]), "M_out_of_range"),
    (_plan(phases=["slide"]), "bad_type"),
    (_without("action"), "missing_field"),
    (_without("duration"), "missing_field"),
    (_without("object_ids"), "missing_field"),
    (_without("goal"), "missing_field"),
    (_plan(phases=[_phase(action="")]), "bad_type"),
    (_plan(phases=[_phase(duration="41")]), "bad_type"),
    (_plan(phases=[_phase(duration=41.0)]), "bad_type"),
    (_plan(phases=[_phase(duration=True)]), "bad_type"),
    (_plan(phases=[_phase(duration=1)]), "bad_type"),
    (_plan(phases=[_phase(object_ids="box")]), "bad_type"),
    (_plan(phases=[_phase(object_ids=[])]), "missing_field"),
    (_plan(phases=[_phase(object_ids=["tree"])]), "unknown_object"),
    (_plan(phases=[_phase(goal="right")]), "bad_type"),
    (_plan(phases=[_phase(goal={})]), "invalid_goal"),
    (_with_goal(region=[0.4, 0.4, 0.3, 0.6]), "invalid_box"),
    (_with_goal(region=[0.1, 0.2, 0.3]), "invalid_box"),
    (_with_goal(region=[0.0, 0.0, 1.2, 0.5]), "invalid_box"),
    (_with_goal(region=["a", 0.0, 1.0, 1.0]), "invalid_box"),
    (_with_goal(direction="sideways"), "invalid_goal"),
    (_with_goal(direction=[0, 0]), "invalid_goal"),
    (_with_goal(direction=[1]), "bad_type"),
    (_with_goal(object_id="tree"), "unknown_object"),
    (_plan(phases=[_phase(duration=40)]), "frame_budget_mismatch"),
    (_plan(phases=[_phase(duration=20), _phase(duration=20)]), "frame_budget_mismatch"),
    (_plan(static_objects="table"), "bad_type"),
    (_plan(phases=[_phase(speed="fast")]), "bad_type"),
]


def _lines(centers, name="obj_0", size=0.1, caption=None):
    lines = []
    for t, (x, y) in enumerate(centers, start=1):
        box = [round(x - size / 2, 6), round(y - size / 2, 6), round(x + size / 2, 6), round(y + size / 2, 6)]
        line = f"Frame_{t}: [[\"{name}\", {json.dumps(box)}]]"
        if caption:
            line += f", caption: {caption}"
        lines.append(line)
    return "\n".join(lines)


class TestJsonText:
    def test_strip_fences(self):
        """Test that a fenced block's body is extracted"""
        assert strip_fences("Sure:\n```json\n{\"a\": 1}\n```\nDone") == "{\"a\": 1}"

    def test_find_json_in_prose(self):
        """Test that JSON surrounded by prose is found"""
        assert find_json("Here you go: {\"score\": 0.5} hope it helps") == {"score": 0.5}

    def test_find_json_none(self):
        assert find_json("no json here") is None

    def test_format_loc(self):
        assert format_loc(("phases", 0, "goal", "region")) == "phases[0].goal.region"
        assert format_loc(()) == ""


class TestPlanParsing:
    def test_valid_plan(self):
        """Test that a valid plan parses and resolves labels to ids"""
        plan = parse_plan_response(_plan(), known_objects=KNOWN)
        assert len(plan.sub_instructions) == 1
        sub = plan.sub_instructions[0]
        assert sub.moving_ids == ["obj_0"]
        assert sub.goal.direction == (1.0, 0.0)
        assert sub.goal.goal_region == BBox.from_list([0.6, 0.6, 0.8, 0.8])
        assert plan.static_ids == ["table"]

    def test_fenced_plan(self):
        """Test that a fenced plan with prose around it parses"""
        raw = "Here is the plan:\n```json\n" + _plan() + "\n```"
        assert parse_plan_response(raw, known_objects=KNOWN).total_plan_frames == 41

    def test_direction_vector_is_normalized(self):
        """Test that a non-unit direction vector is normalized"""
        plan = parse_plan_response(_with_goal(direction=[3, 4]), known_objects=KNOWN)
        assert plan.sub_instructions[0].goal.direction == pytest.approx((0.6, 0.8))

    def test_explicit_total_frames(self):
        """Test that an explicit frame total overrides the document"""
        raw = _plan(phases=[_phase(duration=10), _phase(duration=11)])
        plan = parse_plan_response(raw, total_frames=21, known_objects=KNOWN)
        assert [sub.index for sub in plan.sub_instructions] == [1, 2]

    @pytest.mark.parametrize("raw,kind", MALFORMED_PLANS)
    def test_malformed_plan(self, raw, kind):
        """Test that every malformed plan raises its documented SchemaError kind"""
        with pytest.raises(SchemaError) as e:
            parse_plan_response(raw, total_frames=41, known_objects=KNOWN)
        assert e.value.kind == kind

    def test_malformed_corpus_size(self):
        assert len(MALFORMED_PLANS) >= 30

    @pytest.mark.parametrize("raw,field", [
        (_with_goal(region=[0.4, 0.4, 0.3, 0.6]), "phases[0].goal.region"),
        (_without("duration"), "phases[0].duration"),
        (_plan(phases=[_phase(object_ids=["tree"])]), "phases[0].object_ids"),
        (_plan(phases=[_phase(), "slide"]), "phases[1]"),
        ("{}", "phases"),
    ])
    def test_error_names_field(self, raw, field):
        """Test that a SchemaError carries the path of the failing field"""
        with pytest.raises(SchemaError) as e:
            parse_plan_response(raw, total_frames=41, known_objects=KNOWN)
        assert e.value.field == field

    def test_document_resolves_names(self):
        """Test that the plan document resolves labels through the validation context"""
        document = PlanDocument.model_validate(json.loads(_plan()), context={"known_objects": KNOWN})
        assert document.phases[0].object_ids == ["obj_0"]
        assert document.phases[0].goal.direction == (1.0, 0.0)
        assert PlanDocument.model_validate(json.loads(_plan())).phases[0].object_ids == ["box"]

    def test_serialize_round_trip(self):
        """Test that serializing and reparsing a plan gives an equal plan"""
        raw = _plan(phases=[_phase(duration=20), _phase(duration=21, goal={"direction": [0.0, 1.0]})])
        plan = parse_plan_response(raw, known_objects=KNOWN)
        assert parse_plan_response(serialize_plan(plan), known_objects=KNOWN) == plan

    def test_parse_box_does_not_clamp(self):
        """Test that out-of-range boxes are rejected rather than clamped"""
        with pytest.raises(SchemaError) as e:
            parse_box([0.5, 0.5, 1.01, 0.9])
        assert e.value.kind == "invalid_box"


class TestTrajectoryParsing:
    def test_line_format(self):
        """Test that a 10-frame reply for a 10-frame budget gives one candidate"""
        sub = sub_instruction(frame_budget=10)
        raw = _lines([(0.2 + 0.05 * t, 0.5) for t in range(10)], caption="the box moves")
        candidates = parse_trajectory_response(raw, sub)
        assert len(candidates) == 1
        assert candidates[0].length == 10
        assert candidates[0].caption_per_frame == ["the box moves"] * 10
        assert tuple(candidates[0].centers("obj_0")[-1]) == pytest.approx((0.65, 0.5))

    def test_several_candidates(self):
        """Test that restarting the frame numbers starts a new candidate"""
        sub = sub_instruction(frame_budget=5)
        first = _lines([(0.2 + 0.05 * t, 0.5) for t in range(5)])
        second = _lines([(0.2 + 0.05 * t, 0.4) for t in range(5)])
        candidates = parse_trajectory_response(first + "\n\n" + second, sub, candidate_index=3)
        assert [c.candidate_index for c in candidates] == [3, 4]

    def test_labels_resolve_to_ids(self):
        """Test that an object may be named by its label"""
        sub = sub_instruction(frame_budget=3)
        raw = _lines([(0.3, 0.5), (0.35, 0.5), (0.4, 0.5)], name="box")
        candidate = parse_trajectory_response(raw, sub, known_objects=KNOWN)[0]
        assert candidate.object_ids() == ["obj_0"]

    def test_json_format(self):
        """Test the equivalent JSON array format"""
        sub = sub_instruction(frame_budget=3)
        frames = [{"boxes": {"obj_0": [0.1 + 0.05 * t, 0.4, 0.2 + 0.05 * t, 0.5]}, "caption": "c"} for t in range(3)]
        raw = "```json\n" + json.dumps({"candidates": [{"frames": frames}, {"frames": frames}]}) + "\n```"
        candidates = parse_trajectory_response(raw, sub)
        assert len(candidates) == 2
        assert candidates[0].frames == candidates[1].frames

    def test_line_and_json_agree(self):
        """Test that both formats normalize to the same frames"""
        sub = sub_instruction(frame_budget=3)
        boxes = [[0.1, 0.4, 0.2, 0.5], [0.15, 0.4, 0.25, 0.5], [0.2, 0.4, 0.3, 0.5]]
        line_raw = "\n".join(f"Frame_{t + 1}: [[\"obj_0\", {json.dumps(b)}]]" for t, b in enumerate(boxes))
        json_raw = json.dumps([[["obj_0", b]] for b in boxes])
        assert parse_trajectory_response(line_raw, sub)[0].frames == parse_trajectory_response(json_raw, sub)[0].frames

    def test_frame_count(self):
        """Test that a wrong number of frames raises frame_count"""
        sub = sub_instruction(frame_budget=10)
        with pytest.raises(SchemaError) as e:
            parse_trajectory_response(_lines([(0.3, 0.5)] * 9), sub)
        assert e.value.kind == "frame_count"

    def test_empty_reply(self):
        with pytest.raises(SchemaError) as e:
            parse_trajectory_response("I cannot help with that.", sub_instruction())
        assert e.value.kind == "frame_count"

    def test_unknown_object(self):
        """Test that a box for an object outside the moving set is rejected"""
        sub = sub_instruction(frame_budget=3)
        with pytest.raises(SchemaError) as e:
            parse_trajectory_response(_lines([(0.3, 0.5)] * 3, name="tree"), sub)
        assert e.value.kind == "unknown_object"

    def test_invalid_box(self):
        """Test that an inverted box is rejected"""
        sub = sub_instruction(frame_budget=2)
        raw = "Frame_1: [[\"obj_0\", [0.4, 0.4, 0.3, 0.6]]]\nFrame_2: [[\"obj_0\", [0.4, 0.4, 0.5, 0.6]]]"
        with pytest.raises(SchemaError) as e:
            parse_trajectory_response(raw, sub)
        assert e.value.kind == "invalid_box"

    def test_missing_moving_object(self):
        """Test that a frame missing a moving object is rejected"""
        sub = sub_instruction(frame_budget=2, moving_ids=("obj_0", "obj_1"))
        with pytest.raises(SchemaError) as e:
            parse_trajectory_response(_lines([(0.3, 0.5)] * 2), sub)
        assert e.value.kind == "missing_field"

    def test_python_literal_entries(self):
        """Test that single-quoted entries are accepted"""
        sub = sub_instruction(frame_budget=2)
        raw = "Frame_1: [['obj_0', [0.1, 0.1, 0.2, 0.2]]]\nFrame_2: [['obj_0', [0.15, 0.1, 0.25, 0.2]]]"
        assert parse_trajectory_response(raw, sub)[0].length == 2
