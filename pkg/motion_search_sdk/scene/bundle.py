"""
Scene bundle loading and saving.

A bundle directory holds ``manifest.json``, ``frame.png``, ``background.png``,
``static_mask.png`` and ``objects/<id>/sprite.png`` + ``objects/<id>/mask.png``.
"""
import json
import os
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from motion_search_sdk.core.errors import DimensionMismatch, IoError, ManifestInvalid, MissingAsset
from motion_search_sdk.models.geometry import pixel_box_to_bbox
from motion_search_sdk.models.scene import Manifest, ObjectAsset, ObjectEntry, SceneBundle
from motion_search_sdk.utils.images import frozen, read_png, write_png
from motion_search_sdk.utils.json_text import format_loc
from motion_search_sdk.utils.logging_setup import get_logger

MANIFEST_NAME = "manifest.json"

logger = get_logger(__name__)


def load_scene_bundle(path: str) -> SceneBundle:
    """
    Load and validate a scene bundle directory

    Args:
        path: Bundle directory

    Returns:
        SceneBundle: the validated bundle

    Raises:
        MissingAsset: a referenced file does not exist
        DimensionMismatch: raster sizes differ
        ManifestInvalid: the manifest violates its schema or an invariant
    """
    manifest = _read_manifest(path)
    width, height = manifest.width, manifest.height

    initial_frame = _read_raster(path, manifest.frame, "RGB", "frame")
    background = _read_raster(path, manifest.background, "RGB", "background")
    static_mask = _read_raster(path, manifest.static_mask, "mask", "static_mask")
    for field, raster in (("frame", initial_frame), ("background", background), ("static_mask", static_mask)):
        _check_size(raster, width, height, field)

    seen: List[str] = []
    objects = []
    for i, entry in enumerate(manifest.objects):
        if entry.id in seen:
            raise ManifestInvalid(f"Duplicate object id '{entry.id}'", field=f"objects[{i}].id")
        seen.append(entry.id)
        objects.append(_load_object(path, i, entry, initial_frame, width, height))

    if manifest.plan:
        for i, phase in enumerate(manifest.plan):
            for object_id in phase.moving_ids:
                if object_id not in seen:
                    raise ManifestInvalid(
                        f"Plan phase {i + 1} moves unknown object '{object_id}'",
                        field=f"plan[{i}].moving_ids",
                    )

    bundle = SceneBundle(
        initial_frame=frozen(initial_frame),
        background=frozen(background),
        objects=tuple(objects),
        static_mask=frozen(static_mask),
        ground_line=1.0 if manifest.ground_line is None else manifest.ground_line,
        manifest=manifest,
    )
    logger.debug(f"Loaded scene bundle {path} ({width}x{height}, {len(objects)} object(s))")
    return bundle


def save_scene_bundle(bundle: SceneBundle, path: str) -> str:
    """
    Write a bundle in canonical layout

    Saving a freshly loaded canonical bundle reproduces its files byte for byte.

    Returns:
        str: path of the written manifest
    """
    entries = []
    for asset in bundle.objects:
        sprite_rel = f"objects/{asset.id}/sprite.png"
        mask_rel = f"objects/{asset.id}/mask.png"
        write_png(asset.sprite, os.path.join(path, sprite_rel))
        write_png(asset.mask, os.path.join(path, mask_rel))
        entries.append(
            ObjectEntry(
                id=asset.id,
                label=asset.label,
                sprite=sprite_rel,
                mask=mask_rel,
                initial_box=asset.initial_box,
                resizable=asset.resizable,
                motion=asset.motion,
            )
        )
    write_png(bundle.initial_frame, os.path.join(path, "frame.png"))
    write_png(bundle.background, os.path.join(path, "background.png"))
    write_png(bundle.static_mask, os.path.join(path, "static_mask.png"))

    previous = bundle.manifest
    manifest = Manifest(
        width=bundle.width,
        height=bundle.height,
        ground_line=previous.ground_line if previous else bundle.ground_line,
        prompt=previous.prompt if previous else "",
        objects=entries,
        plan=previous.plan if previous else None,
    )
    manifest_path = os.path.join(path, MANIFEST_NAME)
    try:
        with open(manifest_path, "w", encoding="utf-8") as f:
            f.write(json.dumps(manifest.model_dump(mode="json", exclude_none=True), indent=2) + "\n")
    except OSError as e:
        raise IoError(f"Could not write {manifest_path}: {e}", field=MANIFEST_NAME) from e
    return manifest_path


def mask_pixel_box(mask: np.ndarray) -> Optional[tuple]:
    """Pixel bounding box ``(x0, y0, x1, y1)`` (exclusive end) of a mask, or None when empty"""
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        return None
    return int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1


def _read_manifest(path: str) -> Manifest:
    manifest_path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        raise MissingAsset(f"No {MANIFEST_NAME} in {path}", field=MANIFEST_NAME)
    try:
        with open(manifest_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ManifestInvalid(f"{MANIFEST_NAME} is not valid JSON: {e}", field=MANIFEST_NAME) from e
    try:
        return Manifest.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = format_loc(first["loc"]) or MANIFEST_NAME
        raise ManifestInvalid(f"Manifest field '{field}': {first['msg']}", field=field) from e


def _read_raster(root: str, relative: str, mode: str, field: str) -> np.ndarray:
    full = os.path.join(root, relative)
    if not os.path.isfile(full):
        raise MissingAsset(f"Missing raster '{relative}'", field=field)
    return read_png(full, mode)


def _check_size(raster: np.ndarray, width: int, height: int, field: str) -> None:
    if raster.shape[0] != height or raster.shape[1] != width:
        raise DimensionMismatch(
            f"'{field}' is {raster.shape[1]}x{raster.shape[0]}, expected {width}x{height}",
            field=field,
        )


def _load_object(root: str, i: int, entry: ObjectEntry, frame: np.ndarray, width: int, height: int) -> ObjectAsset:
    prefix = f"objects[{i}]"
    sprite = _read_raster(root, entry.sprite, "RGBA", f"{prefix}.sprite")
    mask = _read_raster(root, entry.mask, "mask", f"{prefix}.mask")
    _check_size(mask, width, height, f"{prefix}.mask")

    box = mask_pixel_box(mask)
    if box is None:
        raise ManifestInvalid(f"Mask of '{entry.id}' is empty", field=f"{prefix}.mask")
    x0, y0, x1, y1 = box
    if sprite.shape[0] != y1 - y0 or sprite.shape[1] != x1 - x0:
        raise DimensionMismatch(
            f"Sprite of '{entry.id}' is {sprite.shape[1]}x{sprite.shape[0]}, "
            f"mask box is {x1 - x0}x{y1 - y0}",
            field=f"{prefix}.sprite",
        )

    crop = mask[y0:y1, x0:x1]
    alpha = sprite[..., 3]
    if not np.array_equal(alpha, np.where(crop, 255, 0).astype(np.uint8)):
        raise ManifestInvalid(
            f"Sprite alpha of '{entry.id}' must be 255 inside the mask and 0 outside",
            field=f"{prefix}.sprite",
        )
    if not np.array_equal(sprite[..., :3][crop], frame[y0:y1, x0:x1][crop]):
        raise ManifestInvalid(
            f"Sprite pixels of '{entry.id}' differ from the initial frame under its mask",
            field=f"{prefix}.sprite",
        )

    rect = entry.initial_box.pixel_rect(width, height)
    mask_box = pixel_box_to_bbox(*box, width, height)
    if max(abs(a - b) for a, b in zip(rect, box)) > 1:
        raise ManifestInvalid(
            f"initial_box of '{entry.id}' does not match its mask box {mask_box.to_list()}",
            field=f"{prefix}.initial_box",
        )
    # The loaded initial_box is the mask box itself
    if rect != box:
        logger.debug(f"initial_box of '{entry.id}' snapped to its mask box {mask_box.to_list()}")

    return ObjectAsset(
        id=entry.id,
        label=entry.label,
        sprite=frozen(sprite),
        mask=frozen(mask),
        initial_box=mask_box,
        resizable=entry.resizable,
        motion=entry.motion,
    )
