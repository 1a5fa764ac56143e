"""
Geometry models for the Motion Search SDK.

All coordinates are normalized to [0, 1] with the origin at the top-left corner
and y increasing downward. Pixel conversion happens only at the render and
rasterize boundaries.
"""
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from motion_search_sdk.utils.numeric import round_half_up

Point = Tuple[float, float]


class BBox(BaseModel):
    """Axis-aligned bounding box in normalized image coordinates"""
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_bounds(self):
        if not (0.0 <= self.x_min < self.x_max <= 1.0):
            raise ValueError(f"x range [{self.x_min}, {self.x_max}] must satisfy 0 <= x_min < x_max <= 1")
        if not (0.0 <= self.y_min < self.y_max <= 1.0):
            raise ValueError(f"y range [{self.y_min}, {self.y_max}] must satisfy 0 <= y_min < y_max <= 1")
        return self

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "BBox":
        """Build a box from ``[x_min, y_min, x_max, y_max]``"""
        if len(values) != 4:
            raise ValueError(f"Expected 4 coordinates, got {len(values)}")
        x_min, y_min, x_max, y_max = (float(v) for v in values)
        return cls(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max)

    @classmethod
    def from_center(cls, center: Point, width: float, height: float) -> "BBox":
        """
        Build a box of the given size around ``center``, shifted back inside
        the unit square when it would cross an edge
        """
        width = min(width, 1.0)
        height = min(height, 1.0)
        x_min = min(max(center[0] - width / 2, 0.0), 1.0 - width)
        y_min = min(max(center[1] - height / 2, 0.0), 1.0 - height)
        return cls(x_min=x_min, y_min=y_min, x_max=min(x_min + width, 1.0), y_max=min(y_min + height, 1.0))

    def to_list(self) -> List[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def center(self) -> Point:
        return bbox_center(self)

    def contains(self, point: Point) -> bool:
        return self.x_min <= point[0] <= self.x_max and self.y_min <= point[1] <= self.y_max

    def pixel_rect(self, width: int, height: int) -> Tuple[int, int, int, int]:
        """
        Rasterize to a pixel rectangle ``(x0, y0, x1, y1)`` with exclusive end

        The origin and the size are each rounded half-up, so translating a
        box never changes its pixel size. The rectangle is at least one pixel
        and is kept inside the image.
        """
        w_px = min(max(round_half_up(self.width * width), 1), width)
        h_px = min(max(round_half_up(self.height * height), 1), height)
        x0 = min(max(round_half_up(self.x_min * width), 0), width - w_px)
        y0 = min(max(round_half_up(self.y_min * height), 0), height - h_px)
        return x0, y0, x0 + w_px, y0 + h_px


def bbox_center(b: BBox) -> Point:
    """Representative point of a box: its center"""
    return ((b.x_min + b.x_max) / 2, (b.y_min + b.y_max) / 2)


def pixel_box_to_bbox(x0: int, y0: int, x1: int, y1: int, width: int, height: int) -> BBox:
    """Normalize a pixel rectangle with exclusive end"""
    return BBox(x_min=x0 / width, y_min=y0 / height, x_max=x1 / width, y_max=y1 / height)
