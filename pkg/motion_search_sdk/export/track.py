"""
Dense track export: concatenate the selected sub-trajectories, resample them
to the generator's frame count and write the conditioning file.
"""
import json
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from motion_search_sdk.core.errors import BadLength, ExportError, IoError, LengthMismatch, ObjectMismatch
from motion_search_sdk.models.geometry import BBox, Point, bbox_center
from motion_search_sdk.models.track import TRACK_FILE_VERSION, DenseTrack, TrackFileMeta
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.utils.logging_setup import get_logger

logger = get_logger(__name__)

JUNCTION_TOLERANCE = 1e-6


def _segment_points(candidate: TrajectoryCandidate, segment: int) -> Dict[str, List[Point]]:
    points: Dict[str, List[Point]] = {}
    for t, frame in enumerate(candidate.frames):
        for object_id in points:
            if object_id not in frame:
                raise ObjectMismatch(
                    f"object '{object_id}' vanishes at frame {t} of segment {segment}", field=object_id
                )
        for object_id, box in frame.items():
            if object_id not in points:
                if t > 0:
                    raise ObjectMismatch(
                        f"object '{object_id}' appears at frame {t} of segment {segment}", field=object_id
                    )
                points[object_id] = []
            points[object_id].append(bbox_center(box))
    return points


def _same_point(a: Point, b: Point) -> bool:
    return abs(a[0] - b[0]) <= JUNCTION_TOLERANCE and abs(a[1] - b[1]) <= JUNCTION_TOLERANCE


def concat_plan(selected: Sequence[TrajectoryCandidate],
                initial_boxes: Optional[Mapping[str, BBox]] = None) -> Dict[str, List[Point]]:
    """
    Concatenate the selected sub-trajectories into one sparse sequence per object

    Every object gets a point for every plan frame. A candidate carries only
    the objects its sub-instruction moves, so an object missing from a whole
    segment is static there: it is held at its last point, including after it
    has moved in an earlier segment. Before it first moves it is held at the
    center of its initial box. When the first frame of a segment repeats the
    last frame of the previous one for every object, it is collapsed into one
    point. Only an object that vanishes or appears inside a segment is an error.

    Args:
        selected: Selected candidates in sub-instruction order
        initial_boxes: Boxes before the first segment, used to pad objects
            that start moving in a later segment

    Returns:
        Sparse center points keyed by object id, all of equal length

    Raises:
        ObjectMismatch: when an object vanishes or appears in the middle of a segment
    """
    if not selected:
        raise BadLength("cannot concatenate an empty plan")
    segments = [_segment_points(candidate, i) for i, candidate in enumerate(selected, start=1)]

    order: List[str] = []
    for segment in segments:
        order.extend(object_id for object_id in segment if object_id not in order)

    last: Dict[str, Point] = {}
    for object_id in order:
        if initial_boxes is not None and object_id in initial_boxes:
            last[object_id] = bbox_center(initial_boxes[object_id])
        else:
            last[object_id] = next(seg[object_id][0] for seg in segments if object_id in seg)

    sequences: Dict[str, List[Point]] = {object_id: [] for object_id in order}
    for i, (candidate, segment) in enumerate(zip(selected, segments)):
        length = candidate.length
        start = 0
        if i > 0 and all(_same_point(last[o], segment[o][0]) for o in segment):
            start = 1
        for object_id in order:
            if object_id in segment:
                sequences[object_id].extend(segment[object_id][start:])
                last[object_id] = segment[object_id][-1]
            else:
                logger.debug(f"Segment {i + 1} does not move '{object_id}'; holding it at {last[object_id]}")
                sequences[object_id].extend([last[object_id]] * (length - start))
    return sequences


def interpolate_dense(points: Sequence[Point], T: int, object_id: str = "") -> DenseTrack:
    """
    Resample a sparse point sequence to ``T`` points, piecewise linearly

    Sample j sits at parameter ``j * (P - 1) / (T - 1)`` of the sparse
    sequence; the first and last points are kept exactly.

    Raises:
        BadLength: when fewer than two points are given or ``T`` is smaller
            than the number of points
    """
    P = len(points)
    if P < 2:
        raise BadLength(f"need at least 2 points to interpolate, got {P}", field=object_id or None)
    if T < P:
        raise BadLength(f"target length {T} is shorter than the {P} sparse points", field=object_id or None)

    sparse = np.asarray(points, dtype=float)
    u = np.arange(T) * (P - 1) / (T - 1)
    knots = np.arange(P, dtype=float)
    xs = np.clip(np.interp(u, knots, sparse[:, 0]), 0.0, 1.0)
    ys = np.clip(np.interp(u, knots, sparse[:, 1]), 0.0, 1.0)
    dense = [(float(x), float(y)) for x, y in zip(xs, ys)]
    dense[0] = (float(sparse[0, 0]), float(sparse[0, 1]))
    dense[-1] = (float(sparse[-1, 0]), float(sparse[-1, 1]))
    return DenseTrack(object_id=object_id, points=dense)


def export_tracks(selected: Sequence[TrajectoryCandidate],
                  T: int,
                  initial_boxes: Optional[Mapping[str, BBox]] = None) -> List[DenseTrack]:
    """Concatenate the selected plan and resample every object to ``T`` points"""
    sparse = concat_plan(selected, initial_boxes)
    tracks = [interpolate_dense(points, T, object_id) for object_id, points in sparse.items()]
    logger.debug(f"Exported {len(tracks)} track(s) of {T} points from {len(selected)} segment(s)")
    return tracks


def track_document(tracks: Sequence[DenseTrack], meta: TrackFileMeta) -> Dict[str, Any]:
    lengths = {track.T for track in tracks}
    if len(lengths) > 1:
        raise LengthMismatch(f"tracks have different lengths: {sorted(lengths)}")
    return {
        "version": TRACK_FILE_VERSION,
        "prompt": meta.prompt,
        "frames": lengths.pop() if lengths else 0,
        "fps": meta.fps,
        "resolution": {"width": meta.width, "height": meta.height},
        "tracks": [{"id": track.object_id, "points": [[x, y] for x, y in track.points]} for track in tracks],
    }


def write_track_file(tracks: Sequence[DenseTrack], path: str, meta: TrackFileMeta) -> str:
    """
    Write the generator conditioning file

    Floats are written in their shortest round-trip form, so reading the
    file back gives the same values.

    Raises:
        LengthMismatch: when the tracks differ in length
        IoError: when the file cannot be written
    """
    document = track_document(tracks, meta)
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2)
            f.write("\n")
    except OSError as e:
        raise IoError(f"Could not write track file {path}: {e}", field=path) from e
    logger.info(f"Wrote {len(tracks)} track(s) of {document['frames']} frames to {path}")
    return path


def read_track_file(path: str) -> Tuple[List[DenseTrack], TrackFileMeta]:
    """
    Read a track file written by :func:`write_track_file`

    Raises:
        IoError: when the file cannot be read
        ExportError: when the document is malformed
        LengthMismatch: when a track does not have the declared frame count
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise IoError(f"Could not read track file {path}: {e}", field=path) from e
    except json.JSONDecodeError as e:
        raise ExportError(f"Track file {path} is not valid JSON: {e}", field=path) from e

    try:
        resolution = document["resolution"]
        meta = TrackFileMeta(
            fps=document["fps"],
            width=resolution["width"],
            height=resolution["height"],
            prompt=document.get("prompt", ""),
        )
        tracks = [
            DenseTrack(object_id=entry["id"], points=[tuple(point) for point in entry["points"]])
            for entry in document["tracks"]
        ]
        frames = document["frames"]
    except (KeyError, TypeError, ValidationError) as e:
        raise ExportError(f"Track file {path} is malformed: {e}", field=path) from e

    for track in tracks:
        if track.T != frames:
            raise LengthMismatch(f"track '{track.object_id}' has {track.T} points, file declares {frames}",
                                 field=track.object_id)
    return tracks, meta


def write_selected_plan(path: str,
                        selected: Sequence[TrajectoryCandidate],
                        texts: Sequence[str],
                        initial_boxes: Mapping[str, BBox],
                        meta: TrackFileMeta) -> str:
    """
    Write the selected sub-trajectories of a run, enough to rebuild its track

    Raises:
        IoError: when the file cannot be written
    """
    document = {
        "prompt": meta.prompt,
        "resolution": {"width": meta.width, "height": meta.height},
        "initial_boxes": {object_id: box.to_list() for object_id, box in initial_boxes.items()},
        "segments": [
            {"sub_index": i, "text": text, "candidate": candidate.model_dump(mode="json")}
            for i, (candidate, text) in enumerate(zip(selected, texts), start=1)
        ],
    }
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2)
            f.write("\n")
    except OSError as e:
        raise IoError(f"Could not write selected plan {path}: {e}", field=path) from e
    return path


def read_selected_plan(path: str) -> Tuple[List[TrajectoryCandidate], Dict[str, BBox], TrackFileMeta]:
    """
    Read a file written by :func:`write_selected_plan`

    Returns:
        (selected candidates, initial boxes, track metadata without fps)

    Raises:
        IoError: when the file cannot be read
        ExportError: when the document is malformed
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise IoError(f"Could not read selected plan {path}: {e}", field=path) from e
    except json.JSONDecodeError as e:
        raise ExportError(f"Selected plan {path} is not valid JSON: {e}", field=path) from e
    try:
        selected = [TrajectoryCandidate.model_validate(segment["candidate"]) for segment in document["segments"]]
        initial_boxes = {object_id: BBox.from_list(values) for object_id, values in document["initial_boxes"].items()}
        resolution = document["resolution"]
        meta = TrackFileMeta(width=resolution["width"], height=resolution["height"], prompt=document.get("prompt", ""))
    except (KeyError, TypeError, ValueError) as e:
        raise ExportError(f"Selected plan {path} is malformed: {e}", field=path) from e
    return selected, initial_boxes, meta
