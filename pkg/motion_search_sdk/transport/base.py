"""
Transport interface for remote model calls.

A transport posts one request body of the remote contract
``{model, temperature, messages: [{role, text, images[]}]}`` and returns the
response ``{text}``.
"""
import os
from abc import ABC, abstractmethod
from typing import Any, Dict

from motion_search_sdk.core.errors import ConfigError, TransportError
from motion_search_sdk.models.config import EndpointConfig

OFFLINE_ENV = "MOTION_SEARCH_OFFLINE"


class Transport(ABC):
    """Posts request bodies to a remote model"""

    name = "transport"

    @abstractmethod
    def post(self, body: Dict[str, Any]) -> Dict[str, Any]:
        """Send one request and return the decoded response"""


def offline_mode() -> bool:
    """True when live network access is forbidden"""
    return os.environ.get(OFFLINE_ENV, "").strip().lower() in ("1", "true", "yes")


def forbid_offline(name: str) -> None:
    if offline_mode():
        raise TransportError(f"{name} transport is disabled because {OFFLINE_ENV} is set; use a replay cassette")


def build_transport(endpoint: EndpointConfig) -> Transport:
    """
    Build the transport an endpoint asks for

    With a cassette the live transport runs inside it: record mode writes
    every exchange, replay mode answers from the file and never touches the
    network, so it needs the endpoint URL but no credentials.
    """
    # imported here to keep the module graph acyclic
    from motion_search_sdk.transport.bedrock import BedrockTransport
    from motion_search_sdk.transport.cassette import CassetteTransport
    from motion_search_sdk.transport.http import HttpTransport

    if endpoint.cassette_mode != "off" and not endpoint.cassette:
        raise ConfigError(f"cassette_mode '{endpoint.cassette_mode}' needs a cassette path", field="cassette")
    replay = endpoint.cassette_mode == "replay"

    if endpoint.transport == "bedrock":
        live: Transport = BedrockTransport(endpoint, replay=replay)
    else:
        live = HttpTransport(endpoint, replay=replay)
    if endpoint.cassette_mode in ("record", "replay"):
        return CassetteTransport(live, endpoint.cassette, mode=endpoint.cassette_mode)
    return live
