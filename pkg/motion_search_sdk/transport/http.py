"""
HTTP transport using requests.
"""
from typing import Any, Dict

import requests

from motion_search_sdk.core.errors import AuthError, TransportError
from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.transport.base import Transport, forbid_offline
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)


class HttpTransport(Transport):
    """POSTs JSON bodies to an endpoint with a bearer key"""

    name = "http"

    def __init__(self, endpoint: EndpointConfig, response_field: str = "text", replay: bool = False):
        # replay runs inside a cassette and never reaches the network
        if not replay:
            forbid_offline("HTTP")
            if not endpoint.api_key:
                raise AuthError("No API key configured; set the <PREFIX>_API_KEY environment variable",
                                field="api_key")
        if not endpoint.url:
            raise TransportError("No endpoint URL configured; set the <PREFIX>_API_URL environment variable",
                                 field="url")
        self.url = endpoint.url
        self.timeout = endpoint.timeout
        self.response_field = response_field
        self._headers = {"Content-Type": "application/json"}
        if endpoint.api_key:
            self._headers["Authorization"] = f"Bearer {endpoint.api_key}"

    def post(self, body: Dict[str, Any]) -> Dict[str, Any]:
        logger.debug(f"POST {self.url} ({len(body.get('messages', []))} message(s))")
        try:
            response = requests.post(self.url, json=body, headers=self._headers, timeout=self.timeout)
        except requests.RequestException as e:
            raise TransportError(f"Request to {self.url} failed: {e}", field="url") from e

        if response.status_code in (401, 403):
            raise AuthError(f"Endpoint rejected the credentials (HTTP {response.status_code})", field="api_key")
        if response.status_code >= 400:
            raise TransportError(f"Endpoint answered HTTP {response.status_code}: {response.text[:200]}")
        try:
            data = response.json()
        except ValueError as e:
            raise TransportError(f"Endpoint returned a non-JSON body: {response.text[:200]}") from e
        if not isinstance(data, dict) or not isinstance(data.get(self.response_field), str):
            raise TransportError(f"Endpoint response has no '{self.response_field}' field")
        return data
