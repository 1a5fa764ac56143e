"""
Message model for the Motion Search SDK.
"""
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from motion_search_sdk.models.files import ImageFile


class Message(BaseModel):
    """One message of a remote model request"""
    role: str
    text: str
    images: List[ImageFile] = Field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the remote contract ``{role, text, images[]}``"""
        return {
            "role": self.role,
            "text": self.text,
            "images": [image.to_base64() for image in self.images],
        }
