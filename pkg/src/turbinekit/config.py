"""Generator configuration: defaults, JSON loading and strict validation.

Every sampled distribution is overridable from a JSON config file whose
blocks mirror the sampling stages (sun, turbines, geometry, camera,
augment, render). Unknown keys are rejected so typos fail loudly instead
of silently running with defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from .render import RenderOptions
from .scene import TurbineGeometry


class ConfigError(ValueError):
    """Invalid generator configuration."""


@dataclass
class SunConfig:
    azimuth_deg: float = 0.0
    altitude_deg: float = 90.0
    dust_density: float = 1.0

    def to_dict(self) -> dict:
        return {
            "azimuth_deg": self.azimuth_deg,
            "altitude_deg": self.altitude_deg,
            "dust_density": self.dust_density,
        }


@dataclass
class TurbineSampling:
    count_multiset: List[int] = field(default_factory=lambda: [1, 1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4])
    y_near_max_m: float = 200.0
    y_far_max_m: float = 800.0
    x_min_m: float = 20.0
    yaw_scatter_sigma_deg: float = 5.0
    scale_variants: List[float] = field(default_factory=lambda: [0.8, 1.0, 1.2])

    def to_dict(self) -> dict:
        return {
            "count_multiset": list(self.count_multiset),
            "y_near_max_m": self.y_near_max_m,
            "y_far_max_m": self.y_far_max_m,
            "x_min_m": self.x_min_m,
            "yaw_scatter_sigma_deg": self.yaw_scatter_sigma_deg,
            "scale_variants": list(self.scale_variants),
        }


@dataclass
class CameraSampling:
    distance_min_m: float = 80.0
    distance_near_max_m: float = 200.0
    distance_far_max_m: float = 800.0
    height_range_m: Tuple[float, float] = (10.0, 260.0)
    focal_length_range_mm: Tuple[float, float] = (3.0, 55.0)
    roll_sigma_deg: float = 3.0
    yaw_deg: float = 0.0
    sensor_width_mm: float = 36.0
    aim_point_m: Tuple[float, float, float] = (0.0, 0.0, 89.0)
    center_on_hub: bool = False

    def to_dict(self) -> dict:
        return {
            "distance_min_m": self.distance_min_m,
            "distance_near_max_m": self.distance_near_max_m,
            "distance_far_max_m": self.distance_far_max_m,
            "height_range_m": list(self.height_range_m),
            "focal_length_range_mm": list(self.focal_length_range_mm),
            "roll_sigma_deg": self.roll_sigma_deg,
            "yaw_deg": self.yaw_deg,
            "sensor_width_mm": self.sensor_width_mm,
            "aim_point_m": list(self.aim_point_m),
            "center_on_hub": self.center_on_hub,
        }


@dataclass
class AugmentSampling:
    hue_sigma: float = 10.0
    saturation_sigma: float = 10.0
    value_sigma: float = 0.3
    jpeg_probability: float = 0.4
    jpeg_quality_range: Tuple[float, float] = (45.0, 100.0)
    noise_probability: float = 0.4
    noise_mean: float = 0.0
    noise_sigma_range: Tuple[float, float] = (1.0, 8.0)
    noise_background_fraction: float = 0.1

    def to_dict(self) -> dict:
        return {
            "hue_sigma": self.hue_sigma,
            "saturation_sigma": self.saturation_sigma,
            "value_sigma": self.value_sigma,
            "jpeg_probability": self.jpeg_probability,
            "jpeg_quality_range": list(self.jpeg_quality_range),
            "noise_probability": self.noise_probability,
            "noise_mean": self.noise_mean,
            "noise_sigma_range": list(self.noise_sigma_range),
            "noise_background_fraction": self.noise_background_fraction,
        }


@dataclass
class GeneratorConfig:
    master_seed: int = 0
    image_count: int = 100
    image_size: Tuple[int, int] = (1280, 720)
    train_fraction: float = 0.8
    background_library: Optional[str] = None
    sun: SunConfig = field(default_factory=SunConfig)
    turbines: TurbineSampling = field(default_factory=TurbineSampling)
    geometry: TurbineGeometry = field(default_factory=TurbineGeometry)
    camera: CameraSampling = field(default_factory=CameraSampling)
    augment: AugmentSampling = field(default_factory=AugmentSampling)
    render: RenderOptions = field(default_factory=RenderOptions)

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "image_count": self.image_count,
            "image_size": list(self.image_size),
            "train_fraction": self.train_fraction,
            "background_library": self.background_library,
            "sun": self.sun.to_dict(),
            "turbines": self.turbines.to_dict(),
            "geometry": self.geometry.to_dict(),
            "camera": self.camera.to_dict(),
            "augment": self.augment.to_dict(),
            "render": self.render.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_TUPLE_FIELDS = {
    "image_size": 2,
    "height_range_m": 2,
    "focal_length_range_mm": 2,
    "aim_point_m": 3,
    "jpeg_quality_range": 2,
    "noise_sigma_range": 2,
    "base_color": 3,
    "sky_color": 3,
}


def _build_section(cls, data: dict, path: str):
    known = set(cls.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {path or 'config'}; "
            f"valid keys: {sorted(known)}"
        )
    kwargs = {}
    for key, value in data.items():
        if key in _TUPLE_FIELDS:
            if not isinstance(value, (list, tuple)) or len(value) != _TUPLE_FIELDS[key]:
                raise ConfigError(
                    f"{path}.{key} must be a list of {_TUPLE_FIELDS[key]} numbers"
                )
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {path or 'config'}: {exc}") from exc


_SECTIONS = {
    "sun": SunConfig,
    "turbines": TurbineSampling,
    "geometry": TurbineGeometry,
    "camera": CameraSampling,
    "augment": AugmentSampling,
    "render": RenderOptions,
}


def config_from_dict(data: dict) -> GeneratorConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    known = set(GeneratorConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"unknown top-level key(s) {sorted(unknown)}; valid keys: {sorted(known)}"
        )
    kwargs = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a JSON object")
            kwargs[key] = _build_section(_SECTIONS[key], value, key)
        elif key == "image_size":
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ConfigError("image_size must be [width, height]")
            kwargs[key] = (int(value[0]), int(value[1]))
        else:
            kwargs[key] = value
    cfg = GeneratorConfig(**kwargs)
    validate_config(cfg)
    return cfg


def load_config(path) -> GeneratorConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def validate_config(cfg: GeneratorConfig) -> None:
    if not isinstance(cfg.master_seed, int):
        raise ConfigError("master_seed must be an integer")
    if not isinstance(cfg.image_count, int) or cfg.image_count < 0:
        raise ConfigError("image_count must be a non-negative integer")
    if not 0.0 <= cfg.train_fraction <= 1.0:
        raise ConfigError("train_fraction must be in [0, 1]")
    w, h = cfg.image_size
    if w <= 0 or h <= 0:
        raise ConfigError("image_size must be positive")

    t = cfg.turbines
    if not t.count_multiset or any(int(n) < 1 for n in t.count_multiset):
        raise ConfigError("turbines.count_multiset must hold positive counts")
    if t.x_min_m <= 0:
        raise ConfigError("turbines.x_min_m must be > 0")
    for name, hi in (("y_near_max_m", t.y_near_max_m), ("y_far_max_m", t.y_far_max_m)):
        if hi <= t.x_min_m:
            raise ConfigError(f"turbines.{name} must exceed x_min_m ({t.x_min_m})")
    if not t.scale_variants or any(s <= 0 for s in t.scale_variants):
        raise ConfigError("turbines.scale_variants must be positive factors")

    c = cfg.camera
    if c.distance_min_m <= 0:
        raise ConfigError("camera.distance_min_m must be > 0")
    for name, hi in (
        ("distance_near_max_m", c.distance_near_max_m),
        ("distance_far_max_m", c.distance_far_max_m),
    ):
        if hi < c.distance_min_m:
            raise ConfigError(f"camera.{name} must be >= distance_min_m")
    for name, rng in (("height_range_m", c.height_range_m), ("focal_length_range_mm", c.focal_length_range_mm)):
        if rng[1] < rng[0]:
            raise ConfigError(f"camera.{name} must be (low, high) with low <= high")
    if c.focal_length_range_mm[0] <= 0:
        raise ConfigError("camera.focal_length_range_mm must be positive")

    a = cfg.augment
    for name, p in (
        ("jpeg_probability", a.jpeg_probability),
        ("noise_probability", a.noise_probability),
        ("noise_background_fraction", a.noise_background_fraction),
    ):
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"augment.{name} must be a probability in [0, 1]")
    if not 1 <= a.jpeg_quality_range[0] <= a.jpeg_quality_range[1] <= 100:
        raise ConfigError("augment.jpeg_quality_range must lie within [1, 100]")
    if a.noise_sigma_range[0] < 0 or a.noise_sigma_range[1] < a.noise_sigma_range[0]:
        raise ConfigError("augment.noise_sigma_range must be (low, high) with 0 <= low <= high")

    if cfg.render.supersample < 1:
        raise ConfigError("render.supersample must be >= 1")
