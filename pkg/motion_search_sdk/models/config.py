"""
Configuration models for the Motion Search SDK.

Config files are JSON (read with the YAML loader, so YAML works too). Credentials
are never read from files: they come from environment variables only.
"""
import os
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from motion_search_sdk.core.errors import ConfigError
from motion_search_sdk.models.report import VerifierWeights
from motion_search_sdk.models.sketch import DEFAULT_SKETCH_FPS
from motion_search_sdk.models.track import DEFAULT_TRACK_FPS, DEFAULT_TRACK_FRAMES

ENV_PREFIXES = ("PLANNER", "VERIFIER", "GENERATOR")


class SearchConfig(BaseModel):
    """Parameters of the test-time search loop"""
    k: int = Field(default=5, ge=1)
    tau: float = Field(default=0.6, ge=0.0, le=1.0)
    max_rounds: int = Field(default=3, ge=1)
    weights: VerifierWeights = Field(default_factory=VerifierWeights)
    min_diversity: float = Field(default=0.05, ge=0.0)
    max_workers: int = Field(default=1, ge=1)
    sketch_fps: float = Field(default=DEFAULT_SKETCH_FPS, gt=0)

    model_config = ConfigDict(extra="forbid")


class VerifierThresholds(BaseModel):
    """Constants of the deterministic verifier"""
    accel_ok: float = 0.02
    accel_zero: float = 0.10
    jump: float = 0.15
    jump_cap: float = 0.3
    penetration_ok: float = 0.05
    penetration_zero: float = 0.5
    support_band: float = 0.02
    stack_tolerance: float = 0.01
    g_min: float = 0.001
    hover_motion: float = 0.005
    hover_min_run: int = 5
    min_unsupported_run: int = 3
    violation_score: float = 0.2
    deformation_ok: float = 0.05
    deformation_zero: float = 0.5

    model_config = ConfigDict(extra="forbid")


class EndpointConfig(BaseModel):
    """Where and how a remote model or service is reached"""
    url: Optional[str] = None
    api_key: Optional[str] = Field(default=None, repr=False)
    model: Optional[str] = None
    temperature: float = 1.0
    timeout: float = 60.0
    transport: Literal["http", "bedrock"] = "http"
    region: Optional[str] = None
    profile: Optional[str] = None
    cassette: Optional[str] = None
    cassette_mode: Literal["off", "record", "replay"] = "off"
    max_retries: int = Field(default=3, ge=0)

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_env(cls, prefix: str, **overrides: Any) -> "EndpointConfig":
        """
        Build an endpoint from ``<PREFIX>_API_URL``, ``<PREFIX>_API_KEY`` and
        ``<PREFIX>_MODEL``; explicit overrides win over the environment except
        for the key
        """
        prefix = prefix.upper()
        if prefix not in ENV_PREFIXES:
            raise ConfigError(f"Unknown endpoint prefix '{prefix}'", field="prefix")
        values: Dict[str, Any] = {
            "url": os.environ.get(f"{prefix}_API_URL"),
            "model": os.environ.get(f"{prefix}_MODEL"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        values["api_key"] = os.environ.get(f"{prefix}_API_KEY")
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid {prefix.lower()} endpoint: {e}", field=prefix.lower()) from e


class PlannerSelection(BaseModel):
    """Which planner backend a run uses"""
    kind: Literal["scripted", "remote"] = "scripted"
    seed: int = 0
    planted: Optional[List[str]] = None
    violation_rate: float = Field(default=0.5, ge=0.0, le=1.0)
    endpoint: Optional[Dict[str, Any]] = None

    model_config = ConfigDict(extra="forbid")


class VerifierSelection(BaseModel):
    """Which verifier backend a run uses"""
    kind: Literal["local", "remote"] = "local"
    endpoint: Optional[Dict[str, Any]] = None
    thresholds: VerifierThresholds = Field(default_factory=VerifierThresholds)

    model_config = ConfigDict(extra="forbid")


class GeneratorSelection(BaseModel):
    """Optional hand-off of the track file to a generation service"""
    enabled: bool = False
    dry_run: bool = True
    endpoint: Optional[Dict[str, Any]] = None

    model_config = ConfigDict(extra="forbid")


class RunConfig(BaseModel):
    """Everything one ``run`` invocation needs"""
    scene: str
    prompt: Optional[str] = None
    planner: PlannerSelection = Field(default_factory=PlannerSelection)
    verifier: VerifierSelection = Field(default_factory=VerifierSelection)
    search: SearchConfig = Field(default_factory=SearchConfig)
    output_dir: str = "out"
    run_id: Optional[str] = None
    track_frames: int = Field(default=DEFAULT_TRACK_FRAMES, ge=2)
    track_fps: float = Field(default=DEFAULT_TRACK_FPS, gt=0)
    write_gif: bool = False
    generator: GeneratorSelection = Field(default_factory=GeneratorSelection)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _no_credentials(self):
        for name, endpoint in (
            ("planner", self.planner.endpoint),
            ("verifier", self.verifier.endpoint),
            ("generator", self.generator.endpoint),
        ):
            if endpoint and "api_key" in endpoint:
                raise ValueError(f"{name}.endpoint.api_key must come from the environment, not the config file")
        return self

    def endpoint(self, prefix: str) -> EndpointConfig:
        """Resolve the endpoint of one backend against the environment"""
        section = {
            "PLANNER": self.planner.endpoint,
            "VERIFIER": self.verifier.endpoint,
            "GENERATOR": self.generator.endpoint,
        }[prefix.upper()]
        return EndpointConfig.from_env(prefix, **(section or {}))


def load_run_config(path: str, **overrides: Any) -> RunConfig:
    """
    Load a RunConfig from a JSON (or YAML) file

    Args:
        path: Config file path
        overrides: Top-level fields that replace the file's values

    Raises:
        ConfigError: when the file is missing, unparsable or invalid
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"Could not read config file {path}: {e}", field="config") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse config file {path}: {e}", field="config") from e
    if not isinstance(data, dict):
        raise ConfigError("Config file must contain an object", field="config")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return parse_run_config(data)


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(f"Invalid run config at '{field}': {first['msg']}", field=field) from e


class SyntheticSceneSpec(BaseModel):
    """Recipe for a seeded synthetic scene bundle"""
    width: int = Field(default=256, ge=32)
    height: int = Field(default=256, ge=32)
    shape: Literal["square", "circle"] = "square"
    object_size: float = Field(default=0.12, gt=0.0, lt=0.5)
    color: Optional[Tuple[int, int, int]] = None
    label: str = "box"
    floor_height: float = Field(default=0.2, gt=0.0, lt=0.6)
    obstacles: int = Field(default=1, ge=0, le=4)
    obstacle_in_goal: bool = False
    frame_budget: int = Field(default=41, ge=2)
    phases: int = Field(default=1, ge=1, le=2)
    seed: int = 0

    model_config = ConfigDict(extra="forbid")
