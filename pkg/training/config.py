"""Run configuration: a tree of dataclasses loaded from YAML.

Unknown keys anywhere in a file or override are rejected with their dotted
path. Overrides are ``dotted.key=value`` strings whose values are parsed
with ``yaml.safe_load``, so ``training.iterations=1`` or
``discriminator.channels=[8,8]`` both work.

Example:
    config = RunConfig.load("micro", overrides=["training.iterations=10"])
    print(config.to_json())
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, get_type_hints

import yaml
from dotenv import load_dotenv

from losses.objective import LossWeights
from model.stgde import MASK_RULES
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"
SEED_ENV = "DAEVI_SEED"


@dataclass
class ModelConfig:
    base_channels: int = 8
    num_blocks: int = 8
    patch_rows: int = 2
    patch_cols: int = 2
    ffn_expansion: int = 4
    mask_rule: str = "additive"
    depth_blocks: str = "all"
    fusion: str = "paired"
    fusion_kernel: int = 3

    def validate(self) -> None:
        if self.base_channels < 1 or self.num_blocks < 1:
            raise ConfigurationError("model.base_channels and model.num_blocks must be >= 1")
        if self.patch_rows < 1 or self.patch_cols < 1:
            raise ConfigurationError("model.patch_rows and model.patch_cols must be >= 1")
        _choice("model.mask_rule", self.mask_rule, MASK_RULES)
        _choice("model.depth_blocks", self.depth_blocks, ("all", "first_half", "last_half"))
        _choice("model.fusion", self.fusion, ("paired", "concat"))
        _choice("model.fusion_kernel", self.fusion_kernel, (1, 3))


@dataclass
class DiscriminatorConfig:
    channels: list[int] = field(default_factory=lambda: [16, 32, 64, 64, 64, 64])
    input: str = "rgbd"
    hinge: str = "printed"
    power_iterations: int = 1

    def validate(self) -> None:
        if not self.channels or any(c < 1 for c in self.channels):
            raise ConfigurationError("discriminator.channels must be a non-empty list of positive ints")
        _choice("discriminator.input", self.input, ("rgbd", "rgb"))
        _choice("discriminator.hinge", self.hinge, ("printed", "standard"))


@dataclass
class LossConfig:
    lambda_d: float = 0.1
    lambda_p: float = 0.1
    lambda_s: float = 250.0
    lambda_i: float = 1.0
    lambda_gen: float = 0.01
    bank_seed: int = 0x5EED_BA4C

    def weights(self) -> LossWeights:
        return LossWeights(self.lambda_d, self.lambda_p, self.lambda_s, self.lambda_i, self.lambda_gen)

    def validate(self) -> None:
        self.weights()


@dataclass
class OptimConfig:
    lr: float = 1e-4
    beta1: float = 0.0
    beta2: float = 0.99
    eps: float = 1e-8

    def validate(self) -> None:
        if self.lr <= 0 or self.eps <= 0:
            raise ConfigurationError("optim.lr and optim.eps must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigurationError("optim.beta1 and optim.beta2 must lie in [0, 1)")


@dataclass
class TrainingConfig:
    seed: Optional[int] = None
    iterations: int = 3000
    batch_size: int = 4
    frames: int = 5
    precision: str = "float32"
    checkpoint_every: int = 0
    log_every: int = 50

    def validate(self) -> None:
        if self.iterations < 0 or self.batch_size < 1 or self.frames < 1:
            raise ConfigurationError("training.iterations >= 0, batch_size >= 1 and frames >= 1 required")
        _choice("training.precision", self.precision, ("float32", "float64"))


@dataclass
class DataConfig:
    num_clips: int = 4
    clip_frames: int = 20
    height: int = 64
    width: int = 64
    mask_fraction: float = 0.08
    num_polyps: int = 3
    camera_drift: float = 0.02
    polyp_speed: float = 0.01
    texture_speed: float = 0.3

    def validate(self) -> None:
        if self.num_clips < 1 or self.clip_frames < 1:
            raise ConfigurationError("data.num_clips and data.clip_frames must be >= 1")
        if self.height % 4 or self.width % 4 or self.height < 4 or self.width < 4:
            raise ConfigurationError(f"data.height/width must be positive multiples of 4, got {self.height}x{self.width}")
        if not 0.0 <= self.mask_fraction < 0.5:
            raise ConfigurationError(f"data.mask_fraction must lie in [0, 0.5), got {self.mask_fraction}")


@dataclass
class InferenceConfig:
    mode: str = "offline"
    window: int = 5
    references: int = 10
    radius: int = 30

    def validate(self) -> None:
        _choice("inference.mode", self.mode, ("offline", "online"))
        if self.window < 1 or self.references < 0 or self.radius < 0:
            raise ConfigurationError("inference.window >= 1, references >= 0 and radius >= 0 required")


@dataclass
class RunConfig:
    """Complete run settings; defaults reproduce the published recipe at desk scale."""

    model: ModelConfig = field(default_factory=ModelConfig)
    discriminator: DiscriminatorConfig = field(default_factory=DiscriminatorConfig)
    losses: LossConfig = field(default_factory=LossConfig)
    optim: OptimConfig = field(default_factory=OptimConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    data: DataConfig = field(default_factory=DataConfig)
    inference: InferenceConfig = field(default_factory=InferenceConfig)

    def validate(self) -> "RunConfig":
        for f in dataclasses.fields(self):
            getattr(self, f.name).validate()
        return self

    @property
    def seed(self) -> int:
        return int(self.training.seed or 0)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]]) -> "RunConfig":
        """Build and validate from nested mappings; unknown keys raise ``ConfigurationError``."""
        return _build(cls, mapping or {}, "").validate()

    @classmethod
    def from_yaml(cls, path: str | Path, overrides: Iterable[str] = ()) -> "RunConfig":
        """Load a YAML (or JSON) file, apply overrides, then resolve the seed.

        Raises:
            ConfigurationError: If the file is missing or malformed, or a key is unknown
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"Config file not found: {path}")
        try:
            with open(path) as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Cannot parse {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path} must hold a mapping at top level")
        logger.info(f"Loading run config from: {path}")
        return cls._resolve(raw, overrides)

    @classmethod
    def load(cls, name_or_path: Optional[str | Path] = None, overrides: Iterable[str] = ()) -> "RunConfig":
        """Accept a named config from ``configs/`` or a file path; no argument means defaults."""
        if name_or_path is None:
            return cls._resolve({}, overrides)
        candidate = Path(name_or_path)
        if not candidate.is_file() and str(name_or_path) in list_available_configs():
            candidate = CONFIGS_DIR / f"{name_or_path}.yaml"
        return cls.from_yaml(candidate, overrides)

    @classmethod
    def _resolve(cls, raw: dict, overrides: Iterable[str]) -> "RunConfig":
        raw = json.loads(json.dumps(raw))
        for item in overrides:
            apply_override(raw, item)
        training = raw.setdefault("training", {})
        if isinstance(training, dict) and training.get("seed") is None:
            load_dotenv()
            env_seed = os.getenv(SEED_ENV)
            if env_seed is not None:
                try:
                    training["seed"] = int(env_seed)
                except ValueError as e:
                    raise ConfigurationError(f"{SEED_ENV} must be an integer, got '{env_seed}'") from e
                logger.info(f"Seed taken from {SEED_ENV}: {training['seed']}")
            else:
                training["seed"] = 0
        return cls.from_mapping(raw)

    # -- export -------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def config_hash(self) -> str:
        """SHA-256 over the architecture sections (model, discriminator)."""
        payload = json.dumps({"model": asdict(self.model), "discriminator": asdict(self.discriminator)},
                             sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def apply_override(raw: dict, item: str) -> None:
    """Set ``dotted.key=value`` in a nested mapping (value parsed as YAML)."""
    if "=" not in item:
        raise ConfigurationError(f"Override must look like section.key=value, got '{item}'")
    key, value = item.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if len(parts) < 2:
        raise ConfigurationError(f"Override key must be dotted (section.key), got '{key}'")
    try:
        parsed = yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse override value for {key}: {e}") from e
    node = raw
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError(f"Override {key}: '{part}' is not a section")
        node = child
    node[parts[-1]] = parsed


def list_available_configs(configs_dir: str | Path = CONFIGS_DIR) -> list[str]:
    """Names of the YAML run configurations in ``configs_dir`` (without extension).

    Example:
        list_available_configs()
        # ['default', 'micro', 'paper']
    """
    config_path = Path(configs_dir)
    if not config_path.exists():
        logger.warning(f"Config directory not found: {configs_dir}")
        return []
    return sorted(f.stem for f in config_path.glob("*.yaml") if not f.stem.startswith("_"))


def _choice(key: str, value, allowed: tuple) -> None:
    if value not in allowed:
        raise ConfigurationError(f"{key} must be one of {list(allowed)}, got {value!r}")


def _build(cls, mapping: Mapping[str, Any], path: str):
    if not isinstance(mapping, Mapping):
        raise ConfigurationError(f"{path or 'config'} must be a mapping, got {type(mapping).__name__}")
    hints = get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(mapping) - known)
    if unknown:
        dotted = ", ".join(f"{path}{k}" for k in unknown)
        raise ConfigurationError(f"Unknown config key(s): {dotted}")
    kwargs = {}
    for name, value in mapping.items():
        hint = hints[name]
        key = f"{path}{name}"
        if dataclasses.is_dataclass(hint):
            kwargs[name] = _build(hint, value or {}, f"{key}.")
        else:
            kwargs[name] = _coerce(key, hint, value)
    return cls(**kwargs)


def _coerce(key: str, hint, value):
    if value is None:
        if hint == Optional[int]:
            return None
        raise ConfigurationError(f"{key} must not be null")
    if hint in (int, Optional[int]):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{key} must be an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, str):
            # PyYAML reads exponents without a dot (1e-4) as strings
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{key} must be a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{key} must be a string, got {value!r}")
        return value
    if hint == list[int]:
        if not isinstance(value, (list, tuple)) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigurationError(f"{key} must be a list of integers, got {value!r}")
        return list(value)
    return value
