"""
Record and replay of remote model exchanges with vcrpy.

The live transport (requests for HTTP, botocore for Bedrock) runs inside a
vcrpy cassette stored as JSON. Requests match on method, path and a digest of
the canonical JSON body, in which attached images are replaced by their own
digests. Repeated identical requests (resamples at the same temperature) are
answered in recording order.
"""
import json
import os
import threading
from collections import Counter
from typing import Any, Dict, Optional

from vcr import VCR
from vcr.errors import CannotOverwriteExistingCassetteException

from motion_search_sdk.core.errors import CassetteMiss, ConfigError, IoError, TransportError
from motion_search_sdk.transport.base import Transport
from motion_search_sdk.utils.images import digest
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

# Keys whose string values are base64 images: our contract, the generator
# payload and the Bedrock Converse body
IMAGE_KEYS = ("images", "initial_frame", "bytes")

FILTERED_HEADERS = ("authorization", "x-amz-date", "x-amz-security-token", "x-amz-content-sha256")

IMAGE_REF_PREFIX = "sha256:"

# vcrpy patches the HTTP stacks process-wide
_PATCH_LOCK = threading.Lock()


def _image_ref(image: str) -> str:
    if image.startswith(IMAGE_REF_PREFIX):
        return image
    return IMAGE_REF_PREFIX + digest(image.encode("ascii"))


def _digest_images(value: Any, key: Optional[str] = None) -> Any:
    if isinstance(value, dict):
        return {k: _digest_images(v, k) for k, v in value.items()}
    if isinstance(value, list):
        return [_digest_images(v, key) for v in value]
    if key in IMAGE_KEYS and isinstance(value, str):
        return _image_ref(value)
    return value


def canonical_request(body: Dict[str, Any]) -> Dict[str, Any]:
    """The request body as stored in a cassette: images become ``sha256:<digest>``"""
    return _digest_images(body)


def request_key(body: Dict[str, Any]) -> str:
    encoded = json.dumps(canonical_request(body), sort_keys=True, separators=(",", ":"))
    return digest(encoded.encode("utf-8"))


def _json_body(request) -> Optional[Any]:
    body = request.body
    if body is None:
        return None
    if isinstance(body, bytes):
        try:
            body = body.decode("utf-8")
        except UnicodeDecodeError:
            return None
    try:
        return json.loads(body)
    except ValueError:
        return None


def canonical_vcr_request(request):
    """``before_record_request`` hook: store the canonical body"""
    data = _json_body(request)
    if isinstance(data, dict):
        request.body = json.dumps(canonical_request(data), sort_keys=True)
    return request


def body_digest(r1, r2) -> None:
    """vcrpy matcher on the digest of the canonical body"""
    assert _body_key(r1) == _body_key(r2)


def _body_key(request) -> str:
    data = _json_body(request)
    if isinstance(data, dict):
        return request_key(data)
    raw = request.body or b""
    return digest(raw if isinstance(raw, bytes) else raw.encode("utf-8"))


def _is_cassette_miss(error: BaseException) -> bool:
    # botocore wraps transport failures in HTTPClientError(error=...)
    seen = set()
    while error is not None and id(error) not in seen:
        if isinstance(error, CannotOverwriteExistingCassetteException):
            return True
        seen.add(id(error))
        kwargs = getattr(error, "kwargs", None)
        wrapped = kwargs.get("error") if isinstance(kwargs, dict) else None
        error = wrapped or error.__cause__ or error.__context__
    return False


class CassetteTransport(Transport):
    """
    Runs a live transport inside a vcrpy cassette

    In record mode every exchange is written to the cassette, which starts
    empty. In replay mode no request leaves the process: an unrecorded or
    exhausted request raises CassetteMiss.

    Args:
        inner: The live transport whose HTTP traffic is recorded or replayed
        path: Cassette file (JSON)
        mode: "record" or "replay"
    """

    name = "cassette"

    def __init__(self, inner: Optional[Transport], path: str, mode: str = "replay"):
        if mode not in ("record", "replay"):
            raise ConfigError(f"Unknown cassette mode '{mode}'", field="cassette_mode")
        if inner is None:
            raise ConfigError("A cassette needs the transport it records or replays", field="cassette_mode")
        self.inner = inner
        self.path = path
        self.mode = mode
        self._played: Counter = Counter()

        if mode == "replay":
            if not os.path.isfile(path):
                raise TransportError(f"Cassette {path} does not exist", field="cassette")
        elif os.path.exists(path):
            try:
                os.remove(path)
            except OSError as e:
                raise IoError(f"Could not reset cassette {path}: {e}", field="cassette") from e

        self._vcr = VCR(
            serializer="json",
            record_mode="none" if mode == "replay" else "all",
            match_on=("method", "path", "body_digest"),
            filter_headers=list(FILTERED_HEADERS),
            before_record_request=canonical_vcr_request,
            decode_compressed_response=True,
        )
        self._vcr.register_matcher("body_digest", body_digest)

    def post(self, body: Dict[str, Any]) -> Dict[str, Any]:
        with _PATCH_LOCK:
            try:
                with self._vcr.use_cassette(self.path) as cassette:
                    # each use_cassette loads afresh; carry the replay position over
                    cassette.play_counts.update(self._played)
                    try:
                        return self.inner.post(body)
                    finally:
                        self._played = Counter(cassette.play_counts)
            except Exception as e:
                if self.mode == "replay" and _is_cassette_miss(e):
                    key = request_key(body)[:12]
                    logger.warning(f"Cassette miss in {self.path} for request {key}")
                    raise CassetteMiss(
                        f"Cassette {self.path} has no remaining response for request {key}",
                        field="cassette",
                    ) from e
                raise

    def remaining(self) -> int:
        """Number of recorded responses not yet replayed"""
        with _PATCH_LOCK:
            with self._vcr.use_cassette(self.path) as cassette:
                recorded = len(cassette.responses)
        return recorded - sum(self._played.values())
