import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
import numpy as np
from unittest.mock import patch, MagicMock

from motion_search_sdk.harness.synthetic import OBJECT_ID, cmd_make_synthetic, make_synthetic_scene
from motion_search_sdk.models.config import SyntheticSceneSpec
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import GoalSpec, SubInstruction
from motion_search_sdk.models.scene import ObjectAsset, SceneBundle
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.transport.base import OFFLINE_ENV, Transport

# Small enough to keep rendering fast, large enough for whole-pixel boxes
SMALL_SCENE = SyntheticSceneSpec(width=128, height=128)


@pytest.fixture(autouse=True)
def offline(monkeypatch):
    """No test may reach a live endpoint"""
    monkeypatch.setenv(OFFLINE_ENV, "1")
    for prefix in ("PLANNER", "VERIFIER", "GENERATOR"):
        for suffix in ("API_URL", "API_KEY", "MODEL"):
            monkeypatch.delenv(f"{prefix}_{suffix}", raising=False)


@pytest.fixture
def mock_boto3_session():
    """Mock boto3 session for testing"""
    with patch("boto3.Session") as mock_session:
        mock_client = MagicMock()
        mock_session.return_value.client.return_value = mock_client
        yield mock_session, mock_client


@pytest.fixture
def scene():
    return make_synthetic_scene(SMALL_SCENE)


@pytest.fixture
def two_phase_scene():
    return make_synthetic_scene(SMALL_SCENE.model_copy(update={"phases": 2}))


@pytest.fixture
def scene_dir(tmp_path):
    return cmd_make_synthetic(SMALL_SCENE, str(tmp_path / "scene"))


@pytest.fixture
def online(monkeypatch):
    monkeypatch.delenv(OFFLINE_ENV, raising=False)


class ModelServer:
    """A local endpoint answering POSTs with canned JSON replies, in order; the last one repeats"""

    def __init__(self, replies):
        self.replies = list(replies)
        self.bodies = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                server.bodies.append(json.loads(self.rfile.read(length)))
                reply = server.replies.pop(0) if len(server.replies) > 1 else server.replies[0]
                payload = json.dumps(reply).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, format, *args):
                pass

        self._httpd = HTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self.url = f"http://127.0.0.1:{self._httpd.server_address[1]}/v1/complete"

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        if self._thread.is_alive():
            self._httpd.shutdown()
        self._httpd.server_close()


@pytest.fixture
def model_server(monkeypatch):
    """Factory for local model endpoints, stopped after the test"""
    servers = []
    for name in ("NO_PROXY", "no_proxy"):
        monkeypatch.setenv(name, "127.0.0.1,localhost")

    def start(replies):
        server = ModelServer(replies).start()
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.stop()


class FakeTransport(Transport):
    """Answers posts from a list of canned response texts, in order"""

    name = "fake"

    def __init__(self, texts, field="text"):
        self.texts = list(texts)
        self.field = field
        self.bodies = []

    def post(self, body):
        self.bodies.append(body)
        if len(self.texts) > 1:
            return {self.field: self.texts.pop(0)}
        return {self.field: self.texts[0]}


def blank_scene(width=100, height=100, static_mask=None, ground_line=1.0, objects=()):
    """A plain scene for geometry-level verifier tests"""
    background = np.full((height, width, 3), 128, dtype=np.uint8)
    if static_mask is None:
        static_mask = np.zeros((height, width), dtype=bool)
    return SceneBundle(
        initial_frame=background,
        background=background,
        objects=tuple(objects),
        static_mask=static_mask,
        ground_line=ground_line,
    )


def square_asset(object_id, box, width=100, height=100, resizable=False):
    """A solid square object whose sprite fills its box"""
    x0, y0, x1, y1 = box.pixel_rect(width, height)
    sprite = np.zeros((y1 - y0, x1 - x0, 4), dtype=np.uint8)
    sprite[..., 0] = 200
    sprite[..., 3] = 255
    mask = np.zeros((height, width), dtype=bool)
    mask[y0:y1, x0:x1] = True
    return ObjectAsset(id=object_id, label=object_id, sprite=sprite, mask=mask, initial_box=box, resizable=resizable)


def candidate_from_centers(centers, size=(0.1, 0.1), object_id=OBJECT_ID, index=0):
    """A single-object candidate with fixed box size along the given centers"""
    w, h = size
    frames = [{object_id: BBox.from_center((float(x), float(y)), w, h)} for x, y in centers]
    return TrajectoryCandidate(candidate_index=index, frames=frames)


def sub_instruction(frame_budget=10, moving_ids=(OBJECT_ID,), region=None, direction=(1.0, 0.0), index=1):
    goal = GoalSpec(goal_region=region, direction=direction, description="move right")
    return SubInstruction(index=index, text="move right", frame_budget=frame_budget,
                          moving_ids=list(moving_ids), goal=goal)
