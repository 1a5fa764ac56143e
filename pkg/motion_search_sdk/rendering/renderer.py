"""
Video sketch rendering: composite object sprites over the static background
along a trajectory candidate.
"""
import glob
import os
from typing import List, Mapping, Optional

import numpy as np
from PIL import Image

from motion_search_sdk.core.errors import ConfigError, IoError
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.scene import ObjectAsset, SceneBundle
from motion_search_sdk.models.sketch import DEFAULT_SKETCH_FPS, VideoSketch
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.utils.images import frozen, read_png, write_png

FRAME_PATTERN = "frame_{:03d}.png"
GIF_NAME = "sketch.gif"
FORMATS = ("png_sequence", "gif")


def render_sketch(candidate: TrajectoryCandidate,
                  scene: SceneBundle,
                  held_boxes: Optional[Mapping[str, BBox]] = None,
                  fps: float = DEFAULT_SKETCH_FPS) -> VideoSketch:
    """
    Render a candidate as a video sketch

    Frame t is the background with every object of frame t's box map pasted at
    its box, in manifest order (later objects over earlier ones).

    Args:
        candidate: The trajectory to render
        scene: Scene providing background and sprites
        held_boxes: Boxes of objects that are not moving in this candidate but
            were displaced earlier in the plan; they are drawn in every frame
        fps: Playback rate stored on the sketch

    Returns:
        VideoSketch: one frame per candidate frame
    """
    held = dict(held_boxes or {})
    frames = []
    for boxes in candidate.frames:
        canvas = np.array(scene.background, dtype=np.uint8)
        for asset in scene.objects:
            box = boxes.get(asset.id, held.get(asset.id))
            if box is not None:
                _paste(canvas, asset, box)
        frames.append(frozen(canvas))
    return VideoSketch(frames=tuple(frames), trajectory_ref=candidate.candidate_index, fps=fps)


def last_frame(sketch: VideoSketch) -> np.ndarray:
    """The final frame of a sketch, used as the next context frame"""
    if not sketch.frames:
        raise ValueError("Cannot take the last frame of an empty sketch")
    return sketch.frames[-1]


def encode_sketch(sketch: VideoSketch, path: str, format: str = "png_sequence") -> List[str]:
    """
    Write a sketch to disk

    The lossless PNG sequence ``frame_000.png ...`` is always written; with
    ``format="gif"`` an animated preview ``sketch.gif`` is written as well,
    with a per-frame delay of 1/fps.

    Returns:
        List[str]: paths of the written files

    Raises:
        IoError: a file could not be written
    """
    if format not in FORMATS:
        raise ConfigError(f"Unknown sketch format '{format}'. Options: {', '.join(FORMATS)}", field="format")
    written = [write_png(frame, os.path.join(path, FRAME_PATTERN.format(t))) for t, frame in enumerate(sketch.frames)]
    if format == "gif":
        gif_path = os.path.join(path, GIF_NAME)
        images = [Image.fromarray(np.asarray(frame)) for frame in sketch.frames]
        try:
            images[0].save(
                gif_path,
                save_all=True,
                append_images=images[1:],
                duration=int(round(1000.0 / sketch.fps)),
                loop=0,
            )
        except OSError as e:
            raise IoError(f"Could not write {gif_path}: {e}", field=gif_path) from e
        written.append(gif_path)
    return written


def read_sketch(path: str, trajectory_ref: int = -1, fps: float = DEFAULT_SKETCH_FPS) -> VideoSketch:
    """Decode a PNG sequence written by :func:`encode_sketch`"""
    files = sorted(glob.glob(os.path.join(path, "frame_*.png")))
    if not files:
        raise IoError(f"No frame_*.png files in {path}", field=path)
    frames = tuple(frozen(read_png(f, "RGB")) for f in files)
    return VideoSketch(frames=frames, trajectory_ref=trajectory_ref, fps=fps)


def _paste(canvas: np.ndarray, asset: ObjectAsset, box: BBox) -> None:
    """Source-over composite of a sprite scaled to ``box``, in place"""
    height, width = canvas.shape[:2]
    x0, y0, x1, y1 = box.pixel_rect(width, height)
    target_w, target_h = x1 - x0, y1 - y0
    sprite = asset.sprite
    if sprite.shape[0] == target_h and sprite.shape[1] == target_w:
        premultiplied = _premultiply(sprite)
    else:
        scaled = Image.fromarray(np.asarray(sprite), mode="RGBA").convert("RGBa").resize(
            (target_w, target_h), Image.BILINEAR
        )
        premultiplied = np.asarray(scaled).astype(np.uint32)

    alpha = premultiplied[..., 3:4]
    region = canvas[y0:y1, x0:x1].astype(np.uint32)
    # dst * (255 - a) / 255, rounded half-up
    under = (region * (255 - alpha) * 2 + 255) // 510
    canvas[y0:y1, x0:x1] = np.clip(premultiplied[..., :3] + under, 0, 255).astype(np.uint8)


def _premultiply(sprite: np.ndarray) -> np.ndarray:
    rgba = sprite.astype(np.uint32)
    alpha = rgba[..., 3:4]
    rgb = (rgba[..., :3] * alpha * 2 + 255) // 510
    return np.concatenate([rgb, alpha], axis=-1)
