import json

import pytest

from motion_search_sdk.core.errors import ParseError
from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.models.report import LAWS, VerifierWeights
from motion_search_sdk.plugins.few_shot import FewShotPlugin
from motion_search_sdk.prompts import LAW_DESCRIPTIONS, law_example, render
from motion_search_sdk.rendering.renderer import render_sketch
from motion_search_sdk.transport.base import OFFLINE_ENV
from motion_search_sdk.transport.client import ModelClient
from motion_search_sdk.verifiers.remote import RemoteVerifier, describe_goal, remote_verify

from conftest import FakeTransport, candidate_from_centers, sub_instruction


def _reply(score, explanation="fine"):
    return json.dumps({"score": score, "explanation": explanation})


@pytest.fixture
def sketch(scene):
    box = scene.initial_boxes()["obj_0"]
    cy = box.center()[1]
    candidate = candidate_from_centers([(0.15 + 0.05 * t, cy) for t in range(5)], size=(box.width, box.height))
    return render_sketch(candidate, scene)


class TestRemoteVerifier:
    def test_uniform_scores(self, sketch):
        """Test that uniform 0.9 replies combine to 0.9"""
        transport = FakeTransport([_reply(0.9)])
        verifier = RemoteVerifier(ModelClient(transport))
        report = verifier.verify(sketch, None, sub_instruction(frame_budget=5), None, VerifierWeights())
        assert report.combined == pytest.approx(0.9)
        assert [law.law for law in report.laws] == list(LAWS)
        # one alignment query and one query per law
        assert len(transport.bodies) == 1 + len(LAWS)

    def test_alignment_sees_first_and_last_frames(self, sketch):
        transport = FakeTransport([_reply(0.8)])
        RemoteVerifier(ModelClient(transport)).alignment(sketch, sub_instruction(frame_budget=5))
        user = transport.bodies[0]["messages"][1]
        assert len(user["images"]) == 2
        assert "Phase: phase 1" in user["text"]

    def test_physics_sees_every_frame(self, sketch):
        transport = FakeTransport([_reply(0.3, "it floats")])
        score = RemoteVerifier(ModelClient(transport)).physics(sketch, "gravity")
        assert score.score == 0.3
        assert score.explanation == "it floats"
        message = transport.bodies[0]["messages"][0]
        assert len(message["images"]) == len(sketch)
        assert LAW_DESCRIPTIONS["gravity"] in message["text"]

    def test_descriptive_reply(self, sketch):
        """Test that a descriptive verdict is accepted in place of a number"""
        transport = FakeTransport([_reply("somewhat inconsistent")])
        score = RemoteVerifier(ModelClient(transport)).physics(sketch, "newton")
        assert score.score == 0.7

    def test_unparsable_reply(self, sketch):
        """Test that an unparsable reply raises ParseError after resampling"""
        transport = FakeTransport(["no idea"])
        verifier = RemoteVerifier(ModelClient(transport, max_retries=1))
        with pytest.raises(ParseError):
            verifier.physics(sketch, "newton")
        assert len(transport.bodies) == 2

    def test_replayed_verification(self, sketch, tmp_path, online, model_server, monkeypatch):
        """Test that a recorded verification replays to the same report"""
        server = model_server([{"text": _reply(0.6)}])
        cassette = str(tmp_path / "verifier.json")
        sub = sub_instruction(frame_budget=5)
        endpoint = EndpointConfig(url=server.url, api_key="key", cassette=cassette, cassette_mode="record")
        recorded = remote_verify(sketch, sub, endpoint)
        server.stop()

        monkeypatch.setenv(OFFLINE_ENV, "1")
        endpoint = EndpointConfig(url=server.url, cassette=cassette, cassette_mode="replay")
        assert remote_verify(sketch, sub, endpoint) == recorded

    def test_describe_goal(self):
        sub = sub_instruction(direction=(0.0, 1.0))
        assert describe_goal(sub) == "move right"
        sub = sub.model_copy(update={"goal": sub.goal.model_copy(update={"description": None})})
        assert describe_goal(sub) == "the net motion points along (0.00, 1.00)"


class TestFewShotPlugin:
    def test_law_of_physics_prompt(self):
        """Test that the law is read back from a rendered physics prompt"""
        for law in LAWS:
            text = render("physics", LAW_DESCRIPTION=LAW_DESCRIPTIONS[law], LAW_EXAMPLE=law_example(law))
            assert FewShotPlugin.law_of(text) == law

    def test_law_of_other_prompt(self):
        assert FewShotPlugin.law_of("Phase: phase 1") is None

    def test_examples_appended(self, sketch):
        """Test that examples reach only the matching physics request"""
        transport = FakeTransport([_reply(0.9)])
        plugin = FewShotPlugin({"gravity": ["A ball hangs in mid-air: score 0.1"]})
        verifier = RemoteVerifier(ModelClient(transport, plugins=[plugin]))
        verifier.physics(sketch, "gravity")
        verifier.physics(sketch, "newton")
        assert transport.bodies[0]["messages"][0]["text"].endswith("A ball hangs in mid-air: score 0.1")
        assert "A ball hangs" not in transport.bodies[1]["messages"][0]["text"]

    def test_unknown_law(self):
        with pytest.raises(ValueError):
            FewShotPlugin({"friction": ["..."]})
