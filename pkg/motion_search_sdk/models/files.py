"""
Image attachment model for the Motion Search SDK.
"""
import base64

import numpy as np
from pydantic import BaseModel

from motion_search_sdk.utils.images import encode_png


class ImageFile(BaseModel):
    """A PNG image attached to a remote request"""
    name: str
    content: bytes
    media_type: str = "image/png"

    @classmethod
    def from_array(cls, name: str, array: np.ndarray) -> "ImageFile":
        return cls(name=name, content=encode_png(array))

    def to_base64(self) -> str:
        return base64.b64encode(self.content).decode("ascii")
