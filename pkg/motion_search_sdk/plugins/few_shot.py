"""
Few-shot plugin: extra in-context examples for the per-law physics prompts.
"""
import re
from typing import Dict, List, Optional

from motion_search_sdk.models.report import LAWS
from motion_search_sdk.plugins.base import TransportPlugin
from motion_search_sdk.prompts import LAW_TITLES

_LAW_LINE = re.compile(r"\(one of the laws\):\s*\n\s*([A-Za-z ]+):")
_TITLE_TO_LAW = {title: law for law, title in LAW_TITLES.items()}


class FewShotPlugin(TransportPlugin):
    """
    Appends examples to physics verification requests

    The law under review is read from the physics prompt itself; requests
    that are not physics prompts pass through unchanged.

    Args:
        examples: Extra example texts per law, e.g. ``{"gravity": ["..."]}``
    """

    def __init__(self, examples: Optional[Dict[str, List[str]]] = None):
        examples = examples or {}
        unknown = set(examples) - set(LAWS)
        if unknown:
            raise ValueError(f"Unknown law(s) {sorted(unknown)}. Options: {', '.join(LAWS)}")
        self.examples = {law: list(texts) for law, texts in examples.items()}

    def pre_invoke(self, body):
        for message in body.get("messages", []):
            law = self.law_of(message.get("text", ""))
            if law and self.examples.get(law):
                message["text"] = message["text"].rstrip("\n") + "\n" + "\n".join(self.examples[law])
        return body

    @staticmethod
    def law_of(text: str) -> Optional[str]:
        """The law a physics prompt asks about, or None"""
        match = _LAW_LINE.search(text)
        if not match:
            return None
        return _TITLE_TO_LAW.get(match.group(1).strip())
