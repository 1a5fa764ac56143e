"""
Dense track models for the Motion Search SDK.
"""
from typing import List, Tuple

from pydantic import BaseModel, Field, model_validator

DEFAULT_TRACK_FRAMES = 81
DEFAULT_TRACK_FPS = 16.0
TRACK_FILE_VERSION = 1


class DenseTrack(BaseModel):
    """Per-frame center points of one object for generator conditioning"""
    object_id: str
    points: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _check_points(self):
        for x, y in self.points:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError(f"point ({x}, {y}) lies outside [0, 1]^2")
        return self

    @property
    def T(self) -> int:
        return len(self.points)


class TrackFileMeta(BaseModel):
    """Metadata written next to the tracks"""
    fps: float = DEFAULT_TRACK_FPS
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    prompt: str = ""
