"""
Text and JSON artefact writing.
"""
import json
import os
from typing import Any

from motion_search_sdk.core.errors import IoError


def write_text(path: str, text: str) -> str:
    """Write ``text`` to ``path``, creating parent directories"""
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise IoError(f"Could not write {path}: {e}", field=path) from e
    return path


def write_json(path: str, document: Any) -> str:
    """Write ``document`` as indented JSON with a trailing newline"""
    return write_text(path, json.dumps(document, indent=2) + "\n")
