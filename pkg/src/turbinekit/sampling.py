"""Seeded per-image scene sampling.

Every random quantity in an image is drawn from a stream derived from
``(master_seed, image_index, stage)``, so any image can be regenerated in
isolation and images can be produced in parallel, in any order, with
identical results. Stages separate the scene draws from pixel-level
randomness (background noise, sensor noise) so adding draws to one stage
never shifts another.

The sampled distributions:

* turbine count from a fixed multiset (half the images hold one turbine)
* a per-image near/far coin that jointly selects the turbine downrange
  range, U(0, 200) vs U(0, 800) m, and the camera distance range,
  U(80, 200) vs U(80, 800) m
* per turbine: downrange y (resampled until >= 20 m so the lateral range
  is non-empty), lateral x uniform on [20, y] with a random sign, blade
  rotation U(0, 360), yaw normal around a shared per-image mean heading
* camera height U(10, 260) m, focal length U(3, 55) mm, roll N(0, 3) deg
* HSV shifts per layer: hue and saturation N(0, 10), value factor 1 + v
  with v ~ N(0, 0.3) resampled while the factor is <= 0.05
* JPEG round-trip on 40% of images with quality U(45, 100); Gaussian
  pixel noise on 40% with sigma U(1, 8); a uniform-noise background on
  10% of images
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .augment import HsvShift
from .camera import CameraConfig
from .config import GeneratorConfig
from .scene import TurbineInstance, normalize_angle

# RNG stage tags: one stream per independent consumer of randomness.
STAGE_SCENE = 0
STAGE_BACKGROUND = 1
STAGE_NOISE = 2
STAGE_SPLIT = 3

# Value factors this close to zero would crush the layer to black; the
# sampler redraws them (they sit ~3.2 sigma out, so redraws are rare).
MIN_VALUE_FACTOR = 0.05


def derive_rng(master_seed: int, image_index: int, stage: int = STAGE_SCENE) -> np.random.Generator:
    """Independent, reproducible random stream for one (image, stage) pair."""
    seq = np.random.SeedSequence((int(master_seed), int(image_index), int(stage)))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class SunState:
    azimuth_deg: float
    altitude_deg: float
    dust_density: float

    def to_dict(self) -> dict:
        return {
            "azimuth_deg": self.azimuth_deg,
            "altitude_deg": self.altitude_deg,
            "dust_density": self.dust_density,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SunState":
        return cls(**d)


@dataclass
class BackgroundChoice:
    kind: str  # "library" or "noise"
    image_index: int = 0
    crop_anchor: Tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if self.kind not in ("library", "noise"):
            raise ValueError(f"unknown background kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "image_index": self.image_index,
            "crop_anchor": list(self.crop_anchor),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BackgroundChoice":
        d = dict(d)
        d["crop_anchor"] = tuple(d["crop_anchor"])
        return cls(**d)


@dataclass
class AugmentPlan:
    hsv_fg: HsvShift
    hsv_bg: HsvShift
    jpeg_quality: Optional[float] = None
    noise_mean: Optional[float] = None
    noise_sigma: Optional[float] = None
    is_noise_background: bool = False

    def to_dict(self) -> dict:
        return {
            "hsv_fg": self.hsv_fg.to_dict(),
            "hsv_bg": self.hsv_bg.to_dict(),
            "jpeg_quality": self.jpeg_quality,
            "noise_mean": self.noise_mean,
            "noise_sigma": self.noise_sigma,
            "is_noise_background": self.is_noise_background,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentPlan":
        d = dict(d)
        d["hsv_fg"] = HsvShift.from_dict(d["hsv_fg"])
        d["hsv_bg"] = HsvShift.from_dict(d["hsv_bg"])
        return cls(**d)


@dataclass
class SceneConfig:
    """Everything sampled for one image; the unit of determinism."""

    sun: SunState
    turbines: List[TurbineInstance]
    camera: CameraConfig
    augment: AugmentPlan
    background: BackgroundChoice
    master_seed: int = 0
    image_index: int = 0

    def to_dict(self) -> dict:
        return {
            "sun": self.sun.to_dict(),
            "turbines": [t.to_dict() for t in self.turbines],
            "camera": self.camera.to_dict(),
            "augment": self.augment.to_dict(),
            "background": self.background.to_dict(),
            "master_seed": self.master_seed,
            "image_index": self.image_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneConfig":
        return cls(
            sun=SunState.from_dict(d["sun"]),
            turbines=[TurbineInstance.from_dict(t) for t in d["turbines"]],
            camera=CameraConfig.from_dict(d["camera"]),
            augment=AugmentPlan.from_dict(d["augment"]),
            background=BackgroundChoice.from_dict(d["background"]),
            master_seed=d["master_seed"],
            image_index=d["image_index"],
        )


def _sample_value_factor(rng: np.random.Generator, sigma: float) -> float:
    while True:
        factor = 1.0 + rng.normal(0.0, sigma)
        if factor > MIN_VALUE_FACTOR:
            return factor


def _sample_hsv(rng: np.random.Generator, aug) -> HsvShift:
    return HsvShift(
        hue_deg=float(rng.normal(0.0, aug.hue_sigma)),
        saturation=float(rng.normal(0.0, aug.saturation_sigma)),
        value_factor=float(_sample_value_factor(rng, aug.value_sigma)),
    )


def sample_scene(master_seed: int, image_index: int, config: GeneratorConfig) -> SceneConfig:
    """Draw one complete scene. Pure in (master_seed, image_index, config)."""
    rng = derive_rng(master_seed, image_index, STAGE_SCENE)
    tcfg = config.turbines
    ccfg = config.camera
    acfg = config.augment

    n = int(rng.choice(np.asarray(tcfg.count_multiset, dtype=int)))

    far = bool(rng.random() < 0.5)
    y_max = tcfg.y_far_max_m if far else tcfg.y_near_max_m
    d_max = ccfg.distance_far_max_m if far else ccfg.distance_near_max_m

    distance = float(rng.uniform(ccfg.distance_min_m, d_max))
    height = float(rng.uniform(*ccfg.height_range_m))
    focal = float(rng.uniform(*ccfg.focal_length_range_mm))
    roll = float(rng.normal(0.0, ccfg.roll_sigma_deg))
    heading = float(rng.uniform(0.0, 360.0))

    turbines = []
    for _ in range(n):
        # U(x_min, y) is empty below x_min; redraw y, keeping its shape above.
        while True:
            y = float(rng.uniform(0.0, y_max))
            if y >= tcfg.x_min_m:
                break
        x = float(rng.uniform(tcfg.x_min_m, y))
        if rng.random() < 0.5:
            x = -x
        yaw = normalize_angle(rng.normal(heading, tcfg.yaw_scatter_sigma_deg))
        blade_rotation = float(rng.uniform(0.0, 360.0))
        scale = float(rng.choice(np.asarray(tcfg.scale_variants, dtype=float)))
        geometry = config.geometry if scale == 1.0 else config.geometry.scaled(scale)
        turbines.append(
            TurbineInstance(
                position=(x, y),
                yaw_deg=yaw,
                blade_rotation_deg=blade_rotation,
                geometry=geometry,
            )
        )

    hsv_fg = _sample_hsv(rng, acfg)
    hsv_bg = _sample_hsv(rng, acfg)
    jpeg_quality = (
        float(rng.uniform(*acfg.jpeg_quality_range)) if rng.random() < acfg.jpeg_probability else None
    )
    if rng.random() < acfg.noise_probability:
        noise_mean: Optional[float] = float(acfg.noise_mean)
        noise_sigma: Optional[float] = float(rng.uniform(*acfg.noise_sigma_range))
    else:
        noise_mean = noise_sigma = None

    if rng.random() < acfg.noise_background_fraction:
        background = BackgroundChoice(kind="noise")
    else:
        background = BackgroundChoice(
            kind="library",
            image_index=int(rng.integers(0, 2**31 - 1)),
            crop_anchor=(float(rng.random()), float(rng.random())),
        )

    aim = tuple(ccfg.aim_point_m)
    if ccfg.center_on_hub and turbines:
        t0 = turbines[0]
        aim = (t0.position[0], t0.position[1], t0.geometry.hub_height)

    camera = CameraConfig(
        distance_m=distance,
        height_m=height,
        focal_length_mm=focal,
        roll_deg=roll,
        pitch_deg=None,
        yaw_deg=ccfg.yaw_deg,
        center_on_hub=ccfg.center_on_hub,
        aim_point=aim,
        sensor_width_mm=ccfg.sensor_width_mm,
        image_size=tuple(config.image_size),
    )

    return SceneConfig(
        sun=SunState(
            azimuth_deg=config.sun.azimuth_deg,
            altitude_deg=config.sun.altitude_deg,
            dust_density=config.sun.dust_density,
        ),
        turbines=turbines,
        camera=camera,
        augment=AugmentPlan(
            hsv_fg=hsv_fg,
            hsv_bg=hsv_bg,
            jpeg_quality=jpeg_quality,
            noise_mean=noise_mean,
            noise_sigma=noise_sigma,
            is_noise_background=background.kind == "noise",
        ),
        background=background,
        master_seed=int(master_seed),
        image_index=int(image_index),
    )
