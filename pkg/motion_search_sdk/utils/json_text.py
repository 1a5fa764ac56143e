"""
Helpers for pulling JSON out of model output text.
"""
import json
import re
from typing import Any, Optional

_FENCE = re.compile(r"```(?:[A-Za-z0-9_-]+)?\s*([\s\S]*?)```")


def strip_fences(text: str) -> str:
    """Return the body of the first fenced block, or the text itself when unfenced"""
    match = _FENCE.search(text)
    if match:
        return match.group(1).strip()
    return text.strip()


def find_json(text: str) -> Optional[Any]:
    """
    Decode the JSON value in ``text``

    Tries the fenced body first, then the outermost ``{...}`` or ``[...]``
    span. Returns None when nothing decodes.
    """
    body = strip_fences(text)
    try:
        return json.loads(body)
    except ValueError:
        pass
    for opener, closer in (("{", "}"), ("[", "]")):
        start, end = body.find(opener), body.rfind(closer)
        if start != -1 and end > start:
            try:
                return json.loads(body[start:end + 1])
            except ValueError:
                continue
    return None


def format_loc(loc) -> str:
    """Render a pydantic error location as a field path, e.g. ``phases[0].goal.region``"""
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out
