"""
Hand-off of an exported track file to a trajectory-conditioned video
generation service. Generation itself happens elsewhere; this module only
submits the job or, in dry-run mode, writes the request it would send.
"""
import json
import os
from typing import Any, Dict, Literal, Optional

import numpy as np
from pydantic import BaseModel

from motion_search_sdk.core.errors import IoError, TransportError
from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.transport.base import Transport
from motion_search_sdk.transport.cassette import CassetteTransport
from motion_search_sdk.transport.http import HttpTransport
from motion_search_sdk.utils.images import to_base64_png
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

PAYLOAD_NAME = "generator_request.json"


class JobHandle(BaseModel):
    """Result of a generator submission"""
    status: Literal["submitted", "dry_run"]
    job_id: Optional[str] = None
    payload_path: Optional[str] = None


class GeneratorClient:
    """
    Submits track files to a generation endpoint

    Args:
        endpoint: Generation endpoint; may be None in dry-run mode
        dry_run: Write the request payload instead of sending it
        out_dir: Where the dry-run payload goes
    """

    def __init__(self, endpoint: Optional[EndpointConfig] = None, dry_run: bool = True, out_dir: str = "."):
        self.endpoint = endpoint
        self.dry_run = dry_run
        self.out_dir = out_dir
        self._transport: Optional[Transport] = None

    def transport(self) -> Transport:
        if self._transport is not None:
            return self._transport
        endpoint = self.endpoint
        if endpoint is None:
            raise TransportError("No generator endpoint configured", field="generator")
        if not endpoint.url:
            raise TransportError("No generator endpoint URL configured; set GENERATOR_API_URL", field="url")
        cassette_mode = endpoint.cassette_mode if endpoint.cassette else "off"
        live = HttpTransport(endpoint, response_field="job_id", replay=cassette_mode == "replay")
        if cassette_mode != "off":
            self._transport = CassetteTransport(live, endpoint.cassette, mode=cassette_mode)
        else:
            self._transport = live
        return self._transport

    def payload(self, track_path: str, initial_frame: np.ndarray) -> Dict[str, Any]:
        """The request body: the track document plus the initial frame"""
        try:
            with open(track_path, "r", encoding="utf-8") as f:
                track = json.load(f)
        except (OSError, ValueError) as e:
            raise IoError(f"Could not read track file {track_path}: {e}", field=track_path) from e
        return {
            "model": self.endpoint.model if self.endpoint else None,
            "temperature": None,
            "prompt": track.get("prompt", ""),
            "track": track,
            "initial_frame": to_base64_png(initial_frame),
        }

    def submit(self, track_path: str, initial_frame: np.ndarray) -> JobHandle:
        """
        Submit one generation job

        Raises:
            TransportError: when no endpoint is configured outside dry-run
                mode, or the endpoint fails
            IoError: when the track file or dry-run payload cannot be accessed
        """
        body = self.payload(track_path, initial_frame)
        if self.dry_run:
            path = os.path.join(self.out_dir, PAYLOAD_NAME)
            try:
                os.makedirs(self.out_dir, exist_ok=True)
                with open(path, "w", encoding="utf-8") as f:
                    json.dump(body, f, indent=2)
                    f.write("\n")
            except OSError as e:
                raise IoError(f"Could not write generator payload {path}: {e}", field=path) from e
            logger.info(f"Dry run: generator request written to {path}")
            return JobHandle(status="dry_run", payload_path=path)

        response = self.transport().post(body)
        job_id = response.get("job_id")
        if not isinstance(job_id, str):
            raise TransportError("Generator response has no 'job_id'")
        logger.info(f"Generator accepted job {job_id}")
        return JobHandle(status="submitted", job_id=job_id)


def generator_client_stub(track_path: str,
                          endpoint_config: Optional[EndpointConfig],
                          initial_frame: np.ndarray,
                          dry_run: bool = True,
                          out_dir: str = ".") -> JobHandle:
    """Submit a track file, or write the request payload in dry-run mode"""
    client = GeneratorClient(endpoint_config, dry_run=dry_run, out_dir=out_dir)
    return client.submit(track_path, initial_frame)
