"""
Model client: builds request bodies, runs plugins and resamples malformed output.
"""
import copy
from typing import Any, Callable, Dict, List, Optional, TypeVar

from motion_search_sdk.core.errors import ParseError, SchemaError, TransportError
from motion_search_sdk.models.message import Message
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.transport.base import Transport
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

T = TypeVar("T")

DEFAULT_MAX_RETRIES = 3


class ModelClient:
    """
    Talks to one remote model through a transport

    Args:
        transport: Where requests go
        model: Model name placed in every body
        temperature: Sampling temperature (default: 1.0)
        plugins: Request hooks applied in order
        max_retries: Resamples after the first attempt when parsing fails
    """

    def __init__(self,
                 transport: Transport,
                 model: Optional[str] = None,
                 temperature: float = 1.0,
                 plugins: Optional[List[TransportPlugin]] = None,
                 max_retries: int = DEFAULT_MAX_RETRIES):
        self.transport = transport
        self.model = model
        self.temperature = temperature
        self.plugins = list(plugins or [])
        self.max_retries = max_retries

    def add_plugin(self, plugin: TransportPlugin) -> None:
        self.plugins.append(plugin)

    def build_body(self, messages: List[Message]) -> Dict[str, Any]:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [message.to_dict() for message in messages],
        }

    def complete(self, messages: List[Message]) -> str:
        """Send one request and return the response text"""
        body = self.build_body(messages)
        for plugin in self.plugins:
            body = plugin.pre_invoke(copy.deepcopy(body))
        response = self.transport.post(body)
        for plugin in self.plugins:
            response = plugin.post_invoke(response)
        text = response.get("text") if isinstance(response, dict) else None
        if not isinstance(text, str):
            raise TransportError("Response has no 'text' field")
        return text

    def complete_parsed(self, messages: List[Message], parse: Callable[[str], T]) -> T:
        """
        Request until ``parse`` accepts the output

        Raises:
            SchemaError or ParseError: the last parse failure, after
                ``max_retries`` resamples
        """
        attempts = self.max_retries + 1
        last_error: Optional[Exception] = None
        for attempt in range(1, attempts + 1):
            text = self.complete(messages)
            try:
                result = parse(text)
            except (SchemaError, ParseError) as e:
                last_error = e
                logger.warning(f"Malformed model output ({attempt}/{attempts}), resampling: {e}")
                continue
            for plugin in self.plugins:
                result = plugin.post_process(result)
            return result
        raise last_error
