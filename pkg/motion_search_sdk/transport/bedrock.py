"""
Amazon Bedrock transport using the Converse API.
"""
import base64
from typing import Any, Dict, List

import boto3
from botocore.exceptions import BotoCoreError, ClientError, NoCredentialsError

from motion_search_sdk.core.errors import AuthError, ConfigError, TransportError
from motion_search_sdk.models.config import EndpointConfig
from motion_search_sdk.transport.base import Transport, forbid_offline
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

AUTH_ERROR_CODES = (
    "AccessDeniedException",
    "UnrecognizedClientException",
    "ExpiredTokenException",
    "InvalidSignatureException",
)

REPLAY_REGION = "us-east-1"


class BedrockTransport(Transport):
    """Sends the remote contract to a Bedrock-hosted multimodal model"""

    name = "bedrock"

    def __init__(self, endpoint: EndpointConfig, replay: bool = False):
        if not endpoint.model:
            raise ConfigError("Bedrock transport needs a model id; set <PREFIX>_MODEL", field="model")
        if replay:
            # requests are still signed before the cassette answers them
            session = boto3.Session(
                region_name=endpoint.region or REPLAY_REGION,
                aws_access_key_id="replay",
                aws_secret_access_key="replay",
            )
        else:
            forbid_offline("Bedrock")
            session = boto3.Session(region_name=endpoint.region, profile_name=endpoint.profile)
        self.bedrock_runtime = session.client("bedrock-runtime")
        self.model = endpoint.model
        logger.debug(f"Initialized Bedrock transport (region: {endpoint.region or 'default'}, model: {self.model})")

    def post(self, body: Dict[str, Any]) -> Dict[str, Any]:
        system: List[Dict[str, Any]] = []
        messages: List[Dict[str, Any]] = []
        for message in body.get("messages", []):
            if message["role"] == "system":
                system.append({"text": message["text"]})
                continue
            content: List[Dict[str, Any]] = [
                {"image": {"format": "png", "source": {"bytes": base64.b64decode(image)}}}
                for image in message.get("images", [])
            ]
            content.append({"text": message["text"]})
            messages.append({"role": message["role"], "content": content})

        params: Dict[str, Any] = {
            "modelId": body.get("model") or self.model,
            "messages": messages,
            "inferenceConfig": {"temperature": body.get("temperature", 1.0)},
        }
        if system:
            params["system"] = system

        try:
            response = self.bedrock_runtime.converse(**params)
        except NoCredentialsError as e:
            raise AuthError(f"No AWS credentials available: {e}", field="profile") from e
        except ClientError as e:
            code = e.response.get("Error", {}).get("Code", "")
            if code in AUTH_ERROR_CODES:
                raise AuthError(f"Bedrock rejected the request ({code})", field="profile") from e
            raise TransportError(f"Bedrock call failed ({code}): {e}") from e
        except BotoCoreError as e:
            raise TransportError(f"Bedrock call failed: {e}") from e

        try:
            parts = response["output"]["message"]["content"]
        except (KeyError, TypeError) as e:
            raise TransportError("Bedrock response has no output message") from e
        return {"text": "".join(part.get("text", "") for part in parts)}
