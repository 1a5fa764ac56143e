"""
Strict parsers for planner output.

Plans are JSON; trajectories come either in the line format
``Frame_N: [["name", [x1, y1, x2, y2]], ...], caption: ...`` or as an
equivalent JSON array. Anything malformed raises SchemaError so the caller can
resample.
"""
import ast
import json
import math
import re
from typing import Annotated, Any, Dict, List, Mapping, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictInt,
    StrictStr,
    StringConstraints,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)
from pydantic_core import PydanticCustomError

from motion_search_sdk.core.errors import SchemaError
from motion_search_sdk.models.geometry import BBox
from motion_search_sdk.models.plan import (
    DEFAULT_TOTAL_FRAMES,
    MAX_SUB_INSTRUCTIONS,
    GoalSpec,
    HighLevelPlan,
    SubInstruction,
)
from motion_search_sdk.models.trajectory import TrajectoryCandidate
from motion_search_sdk.utils.json_text import find_json, format_loc, strip_fences

DIRECTION_WORDS = {
    "right": (1.0, 0.0),
    "left": (-1.0, 0.0),
    "up": (0.0, -1.0),
    "down": (0.0, 1.0),
}

_FRAME_LINE = re.compile(r"^\s*\**\s*Frame[_ ]?(\d+)\**\s*:\s*(\[.*\])\s*(?:,\s*caption\s*:\s*(.*))?$", re.IGNORECASE)


# SchemaError kinds a validator may raise directly as its pydantic error type
SCHEMA_KINDS = (
    "missing_field",
    "bad_type",
    "frame_budget_mismatch",
    "M_out_of_range",
    "frame_count",
    "unknown_object",
    "invalid_box",
    "invalid_goal",
)

# Every other pydantic error type is a bad_type
_ERROR_KINDS = {
    "missing": "missing_field",
    "too_short": "missing_field",
}


def _resolve_name(name: str, info: ValidationInfo) -> str:
    known_objects = (info.context or {}).get("known_objects")
    if known_objects is None:
        return name
    if name in known_objects:
        return known_objects[name]
    raise PydanticCustomError("unknown_object", "unknown object '{name}'", {"name": name})


class GoalDocument(BaseModel):
    """A phase goal as the planner writes it"""
    region: Optional[BBox] = None
    direction: Optional[Tuple[float, float]] = None
    description: StrictStr = ""
    object_id: Optional[StrictStr] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("region", mode="before")
    @classmethod
    def _check_region(cls, value: Any) -> Optional[BBox]:
        if value is None:
            return None
        try:
            return parse_box(value)
        except SchemaError:
            raise PydanticCustomError("invalid_box", "{box} is not a valid box", {"box": repr(value)})

    @field_validator("direction", mode="before")
    @classmethod
    def _check_direction(cls, value: Any) -> Optional[Tuple[float, float]]:
        if value is None:
            return None
        if isinstance(value, str):
            word = value.strip().lower()
            if word not in DIRECTION_WORDS:
                raise PydanticCustomError("invalid_goal", "'{word}' is not a known direction", {"word": value})
            return DIRECTION_WORDS[word]
        if not isinstance(value, list) or len(value) != 2 or not all(_is_number(v) for v in value):
            raise PydanticCustomError("bad_type", "direction must be a word or [dx, dy]")
        dx, dy = float(value[0]), float(value[1])
        norm = math.hypot(dx, dy)
        if norm == 0.0 or not math.isfinite(norm):
            raise PydanticCustomError("invalid_goal", "direction must be a non-zero vector")
        if abs(norm - 1.0) <= 1e-9:
            return (dx, dy)
        return GoalSpec.unit(dx, dy)

    @field_validator("object_id")
    @classmethod
    def _resolve_object(cls, value: Optional[str], info: ValidationInfo) -> Optional[str]:
        return None if value is None else _resolve_name(value, info)

    @model_validator(mode="after")
    def _check_goal(self):
        if self.region is None and self.direction is None:
            raise PydanticCustomError("invalid_goal", "goal needs a region, a direction, or both")
        return self

    def to_goal(self) -> GoalSpec:
        return GoalSpec(goal_region=self.region, direction=self.direction, description=self.description,
                        object_id=self.object_id)


class PhaseDocument(BaseModel):
    """One phase of a plan document"""
    action: Annotated[str, StringConstraints(strict=True, strip_whitespace=True, min_length=1)]
    duration: Annotated[StrictInt, Field(ge=2)]
    object_ids: Annotated[List[StrictStr], Field(min_length=1)]
    goal: GoalDocument

    model_config = ConfigDict(extra="forbid")

    @field_validator("object_ids")
    @classmethod
    def _resolve_objects(cls, value: List[str], info: ValidationInfo) -> List[str]:
        return [_resolve_name(name, info) for name in value]


class PlanDocument(BaseModel):
    """The JSON document a planner returns for a prompt"""
    phases: Annotated[List[PhaseDocument], Field(min_length=1, max_length=MAX_SUB_INSTRUCTIONS)]
    total_frames: Optional[StrictInt] = None
    static_objects: List[StrictStr] = Field(default_factory=list)
    source_prompt: StrictStr = ""

    model_config = ConfigDict(extra="forbid")


def _schema_error(error: Dict[str, Any]) -> SchemaError:
    loc, kind = tuple(error["loc"]), error["type"]
    if kind not in SCHEMA_KINDS:
        if loc == ("phases",) and kind in ("too_short", "too_long"):
            kind = "M_out_of_range"
        else:
            kind = _ERROR_KINDS.get(kind, "bad_type")
    field = format_loc(loc) or None
    return SchemaError(kind, f"{field or 'plan'}: {error['msg']}", field=field)


def parse_plan_response(raw: str,
                        total_frames: Optional[int] = None,
                        known_objects: Optional[Mapping[str, str]] = None) -> HighLevelPlan:
    """
    Parse and validate a high-level plan

    Args:
        raw: Planner output text (JSON, optionally fenced)
        total_frames: Required sum of phase durations; None reads the
            document's "total_frames" and falls back to 41
        known_objects: Accepted object names (ids and labels) mapped to ids;
            None accepts any name

    Returns:
        HighLevelPlan: the validated plan

    Raises:
        SchemaError: kind ``missing_field``, ``bad_type``, ``M_out_of_range``,
            ``frame_budget_mismatch``, ``unknown_object``, ``invalid_box`` or
            ``invalid_goal``. The first validation error decides the kind.
    """
    try:
        document = PlanDocument.model_validate(find_json(raw), context={"known_objects": known_objects})
    except ValidationError as e:
        raise _schema_error(e.errors()[0]) from e

    if total_frames is None:
        total_frames = document.total_frames if document.total_frames is not None else DEFAULT_TOTAL_FRAMES
    subs = [
        SubInstruction(index=i, text=phase.action, frame_budget=phase.duration, moving_ids=phase.object_ids,
                       goal=phase.goal.to_goal())
        for i, phase in enumerate(document.phases, start=1)
    ]

    budget = sum(sub.frame_budget for sub in subs)
    if budget != total_frames:
        raise SchemaError("frame_budget_mismatch", f"phase durations sum to {budget}, expected {total_frames}",
                          field="phases")

    return HighLevelPlan(
        sub_instructions=subs,
        total_plan_frames=total_frames,
        source_prompt=document.source_prompt,
        static_ids=[_resolve_static(name, known_objects) for name in document.static_objects],
    )


def serialize_plan(plan: HighLevelPlan) -> str:
    """Serialize a plan in the schema :func:`parse_plan_response` reads"""
    phases = []
    for sub in plan.sub_instructions:
        goal: Dict[str, Any] = {}
        if sub.goal.goal_region is not None:
            goal["region"] = sub.goal.goal_region.to_list()
        if sub.goal.direction is not None:
            goal["direction"] = list(sub.goal.direction)
        goal["description"] = sub.goal.description
        if sub.goal.object_id is not None:
            goal["object_id"] = sub.goal.object_id
        phases.append({
            "action": sub.text,
            "duration": sub.frame_budget,
            "object_ids": list(sub.moving_ids),
            "goal": goal,
        })
    document = {
        "source_prompt": plan.source_prompt,
        "total_frames": plan.total_plan_frames,
        "phases": phases,
        "static_objects": list(plan.static_ids),
    }
    return json.dumps(document, indent=2) + "\n"


def parse_box(value: Any, where: str = "box") -> BBox:
    """Validate ``[x_min, y_min, x_max, y_max]`` without clamping"""
    if not isinstance(value, (list, tuple)) or len(value) != 4 or not all(_is_number(v) for v in value):
        raise SchemaError("invalid_box", f"{where} must be four numbers, got {value!r}", field=where)
    try:
        return BBox.from_list(value)
    except (ValidationError, ValueError) as e:
        raise SchemaError("invalid_box", f"{where} {list(value)} is not a valid box", field=where) from e


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _resolve_static(name: str, known_objects: Optional[Mapping[str, str]]) -> str:
    # Static names may describe background parts that are not scene objects
    if known_objects is not None and name in known_objects:
        return known_objects[name]
    return name


def parse_trajectory_response(raw: str,
                              sub: SubInstruction,
                              candidate_index: int = 0,
                              known_objects: Optional[Mapping[str, str]] = None) -> List[TrajectoryCandidate]:
    """
    Parse one planner reply into trajectory candidates

    A reply may hold several candidates: in the line format a new candidate
    starts whenever the frame number does not increase; in JSON, a
    ``{"candidates": [...]}`` document lists them explicitly.

    Args:
        raw: Planner output text
        sub: The sub-instruction the reply answers
        candidate_index: Index given to the first parsed candidate
        known_objects: Names (ids and labels) mapped to ids; defaults to
            the sub-instruction's moving ids

    Raises:
        SchemaError: kind ``frame_count``, ``unknown_object``,
            ``invalid_box``, ``missing_field`` or ``bad_type``
    """
    names = dict(known_objects) if known_objects is not None else {}
    for object_id in sub.moving_ids:
        names.setdefault(object_id, object_id)

    raw_candidates = _line_candidates(raw)
    if not raw_candidates:
        raw_candidates = _json_candidates(raw)
    if not raw_candidates:
        raise SchemaError("frame_count", "reply contains no frames")

    candidates = []
    for offset, frames in enumerate(raw_candidates):
        candidates.append(_build_candidate(frames, sub, candidate_index + offset, names))
    return candidates


def _line_candidates(raw: str) -> List[List[Tuple[Any, Optional[str]]]]:
    candidates: List[List[Tuple[Any, Optional[str]]]] = []
    current: List[Tuple[Any, Optional[str]]] = []
    last_number = None
    for line in strip_fences(raw).splitlines():
        match = _FRAME_LINE.match(line)
        if not match:
            continue
        number = int(match.group(1))
        if last_number is not None and number <= last_number and current:
            candidates.append(current)
            current = []
        last_number = number
        entries = _literal(match.group(2))
        caption = match.group(3).strip() if match.group(3) else None
        current.append((entries, caption))
    if current:
        candidates.append(current)
    return candidates


def _json_candidates(raw: str) -> List[List[Tuple[Any, Optional[str]]]]:
    data = find_json(raw)
    if isinstance(data, dict) and isinstance(data.get("candidates"), list):
        documents = data["candidates"]
    elif data is None:
        return []
    else:
        documents = [data]

    candidates = []
    for document in documents:
        frames = document.get("frames") if isinstance(document, dict) else document
        if not isinstance(frames, list):
            raise SchemaError("bad_type", "trajectory JSON must be a list of frames")
        parsed = []
        for frame in frames:
            if isinstance(frame, dict):
                boxes = frame.get("boxes", frame.get("objects"))
                if isinstance(boxes, dict):
                    boxes = [[name, box] for name, box in boxes.items()]
                parsed.append((boxes, frame.get("caption")))
            else:
                parsed.append((frame, None))
        candidates.append(parsed)
    return candidates


def _literal(text: str) -> Any:
    try:
        return json.loads(text)
    except ValueError:
        pass
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as e:
        raise SchemaError("bad_type", f"cannot read frame entries {text[:80]!r}") from e


def _build_candidate(frames: List[Tuple[Any, Optional[str]]],
                     sub: SubInstruction,
                     candidate_index: int,
                     names: Mapping[str, str]) -> TrajectoryCandidate:
    if len(frames) != sub.frame_budget:
        raise SchemaError("frame_count", f"candidate has {len(frames)} frames, expected {sub.frame_budget}")

    expected = set(sub.moving_ids)
    parsed_frames = []
    captions = []
    for t, (entries, caption) in enumerate(frames):
        where = f"frame {t}"
        if not isinstance(entries, (list, tuple)):
            raise SchemaError("bad_type", f"{where} must list [name, box] pairs", field=where)
        boxes: Dict[str, BBox] = {}
        for entry in entries:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2 or not isinstance(entry[0], str):
                raise SchemaError("bad_type", f"{where} entry {entry!r} must be [name, box]", field=where)
            name, box = entry
            if name not in names or names[name] not in expected:
                raise SchemaError("unknown_object", f"{where} names '{name}', not one of {sorted(expected)}",
                                  field=where)
            boxes[names[name]] = parse_box(box, f"{where}.{name}")
        missing = expected - set(boxes)
        if missing:
            raise SchemaError("missing_field", f"{where} has no box for {sorted(missing)}", field=where)
        parsed_frames.append(boxes)
        captions.append(caption if isinstance(caption, str) else "")

    return TrajectoryCandidate(
        candidate_index=candidate_index,
        frames=parsed_frames,
        caption_per_frame=captions if any(captions) else None,
    )
