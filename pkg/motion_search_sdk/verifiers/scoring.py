"""
Score aggregation and parsing of verifier model output.
"""
import re
from typing import Mapping, Tuple

from motion_search_sdk.core.errors import ParseError
from motion_search_sdk.models.report import LAWS, VerifierWeights
from motion_search_sdk.utils.json_text import find_json
from motion_search_sdk.utils.logging_setup import get_logger
from motion_search_sdk.utils.numeric import clamp

logger = get_logger(__name__)

# Longest phrases first so "very inconsistent" wins over "inconsistent"
DESCRIPTIVE_SCORES = (
    ("somewhat inconsistent", 0.7),
    ("somewhat consistent", 0.8),
    ("very inconsistent", 0.1),
    ("very consistent", 1.0),
    ("inconsistent", 0.4),
    ("consistent", 0.9),
)

_NUMERIC_SCORE = re.compile(r"score\"?\s*[:=]\s*(-?\d+(?:\.\d+)?)", re.IGNORECASE)


def combine(semantic: float, laws: Mapping[str, float], weights: VerifierWeights) -> float:
    """
    Selection objective: ``sem * semantic + phys * sum(lambda_l * law_l)``

    Args:
        semantic: Semantic alignment score in [0, 1]
        laws: Score per law in [0, 1]
        weights: Objective weights

    Returns:
        float: combined score in [0, 1]

    Raises:
        WeightError: when the weights violate their invariants
    """
    weights.check()
    physical = sum(weights.laws[law] * laws[law] for law in LAWS)
    # float noise can push a perfect score a hair above 1
    return clamp(weights.sem * semantic + weights.phys * physical)


def descriptive_score(text: str) -> float:
    """Map a descriptive verdict such as "somewhat inconsistent" to a score"""
    lowered = text.lower()
    for phrase, value in DESCRIPTIVE_SCORES:
        if re.search(rf"\b{phrase}\b", lowered):
            return value
    raise ParseError(f"No score or descriptive verdict in: {text[:200]!r}")


def parse_score_response(text: str) -> Tuple[float, str]:
    """
    Parse a verifier reply into ``(score, explanation)``

    Accepts ``{"score": ..., "explanation": ...}`` (fenced or not), a
    descriptive verdict in place of the number, or a bare ``score: x`` line.
    Scores outside [0, 1] are clamped with a warning.

    Raises:
        ParseError: when no score can be recovered
    """
    data = find_json(text)
    if isinstance(data, dict) and "score" in data:
        explanation = str(data.get("explanation", ""))
        raw = data["score"]
        if isinstance(raw, bool):
            raise ParseError(f"Score must be a number, got {raw!r}", field="score")
        if isinstance(raw, (int, float)):
            return _in_range(float(raw)), explanation
        try:
            return _in_range(float(str(raw).strip())), explanation
        except ValueError:
            return descriptive_score(str(raw)), explanation

    match = _NUMERIC_SCORE.search(text)
    if match:
        return _in_range(float(match.group(1))), text.strip()
    return descriptive_score(text), text.strip()


def _in_range(value: float) -> float:
    if not 0.0 <= value <= 1.0:
        logger.warning(f"ScoreOutOfRange: verifier returned {value}, clamped to [0, 1]")
    return clamp(value)
