"""
Video sketch model for the Motion Search SDK.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

DEFAULT_SKETCH_FPS = 4.0


@dataclass(frozen=True, eq=False)
class VideoSketch:
    """Composited frames of one trajectory candidate"""
    frames: Tuple[np.ndarray, ...]
    trajectory_ref: int
    fps: float = DEFAULT_SKETCH_FPS

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def size(self) -> Tuple[int, int]:
        """``(width, height)`` in pixels"""
        height, width = self.frames[0].shape[:2]
        return int(width), int(height)
