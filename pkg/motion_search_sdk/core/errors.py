"""
Error hierarchy for the Motion Search SDK.

Every error carries a stable ``exit_code`` so the command line can map failures
to documented process exit statuses.
"""
from typing import Optional


class MotionSearchError(Exception):
    """Base class for all SDK errors"""
    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class ConfigError(MotionSearchError):
    """Invalid run configuration, endpoint configuration or CLI arguments"""
    exit_code = 3


class SceneError(MotionSearchError):
    """Base class for scene bundle problems"""
    exit_code = 4


class MissingAsset(SceneError):
    """A file referenced by the manifest is absent"""


class DimensionMismatch(SceneError):
    """Raster sizes inside one bundle differ"""


class ManifestInvalid(SceneError):
    """The manifest violates its schema or a bundle invariant"""


class SchemaError(MotionSearchError):
    """
    A planner response was malformed or under-specified.

    The ``kind`` attribute is one of ``missing_field``, ``bad_type``,
    ``frame_budget_mismatch``, ``M_out_of_range``, ``frame_count``,
    ``unknown_object``, ``invalid_box`` or ``invalid_goal``.
    """
    exit_code = 5

    def __init__(self, kind: str, message: str, field: Optional[str] = None):
        super().__init__(f"{kind}: {message}", field=field)
        self.kind = kind


class ParseError(MotionSearchError):
    """A verifier response or a verify-only input could not be parsed"""
    exit_code = 5


class TransportError(MotionSearchError):
    """The remote endpoint could not be reached or answered with an error"""
    exit_code = 6


class CassetteMiss(TransportError):
    """A replay cassette has no (remaining) entry for a request"""


class AuthError(MotionSearchError):
    """Credentials are missing or were rejected"""
    exit_code = 7


class IoError(MotionSearchError):
    """Writing or reading an artefact on disk failed"""
    exit_code = 8


class WeightError(MotionSearchError):
    """Verifier weights violate their invariants"""
    exit_code = 9


class EmptyCandidateSet(MotionSearchError):
    """Selection was asked to choose from nothing"""
    exit_code = 10


class ExportError(MotionSearchError):
    """Base class for dense track export problems"""
    exit_code = 11


class BadLength(ExportError):
    """A sparse sequence is too short or the target length is too small"""


class LengthMismatch(ExportError):
    """Tracks written to one file have different lengths"""


class ObjectMismatch(ExportError):
    """An object vanished in the middle of a selected segment"""


# Process exit statuses that are not tied to an exception class
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_BEST_EFFORT = 2
