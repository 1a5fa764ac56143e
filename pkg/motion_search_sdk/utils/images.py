"""
Raster helpers: PNG encoding, decoding and base64 attachments.
"""
import base64
import hashlib
import io
import os

import numpy as np
from PIL import Image

from motion_search_sdk.core.errors import IoError


def encode_png(array: np.ndarray) -> bytes:
    """Encode an RGB, RGBA or binary raster as PNG bytes"""
    if array.dtype == bool:
        image = Image.fromarray(array.astype(np.uint8) * 255, mode="L")
    else:
        image = Image.fromarray(np.ascontiguousarray(array, dtype=np.uint8))
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def write_png(array: np.ndarray, path: str) -> str:
    """Write a raster to ``path`` as PNG"""
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "wb") as f:
            f.write(encode_png(array))
    except OSError as e:
        raise IoError(f"Could not write {path}: {e}", field=path) from e
    return path


def read_png(path: str, mode: str) -> np.ndarray:
    """
    Read a PNG into a numpy array

    Args:
        path: File to read
        mode: "RGB", "RGBA" or "mask" (returns a boolean array, nonzero is True)
    """
    with Image.open(path) as image:
        if mode == "mask":
            return np.asarray(image.convert("L")) > 0
        return np.array(image.convert(mode), dtype=np.uint8)


def to_base64_png(array: np.ndarray) -> str:
    return base64.b64encode(encode_png(array)).decode("ascii")


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def frozen(array: np.ndarray) -> np.ndarray:
    """Return a read-only view so shared rasters cannot be mutated"""
    view = array.view()
    view.flags.writeable = False
    return view
