"""Silhouette renderer: turbines as flat-shaded polygons over backgrounds.

The photorealistic path this replaces is out of scope; rendering here is a
painter's-algorithm fill of each turbine's convex parts, back to front by
hub depth, with 2x2 supersampled coverage for anti-aliased edges. Colors
are a flat base tone modulated by a simple sun term and blended toward a
sky color with distance haze.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw

from .camera import NEAR_PLANE, CameraPose
from .scene import TurbineInstance, rotor_center, turbine_part_points

log = logging.getLogger(__name__)

BACKGROUND_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")

# Raster safety clamp for extreme off-frame coordinates (see _raster_coords).
_COORD_LIMIT = 1.0e7


class BackgroundLibraryError(RuntimeError):
    """The background image library is missing or unusable."""


@dataclass
class RenderOptions:
    supersample: int = 2
    base_color: Tuple[int, int, int] = (235, 235, 235)
    sky_color: Tuple[int, int, int] = (200, 216, 235)
    haze_max_depth_m: float = 1000.0
    sun_ambient: float = 0.55

    def to_dict(self) -> dict:
        return {
            "supersample": self.supersample,
            "base_color": list(self.base_color),
            "sky_color": list(self.sky_color),
            "haze_max_depth_m": self.haze_max_depth_m,
            "sun_ambient": self.sun_ambient,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RenderOptions":
        d = dict(d)
        d["base_color"] = tuple(d["base_color"])
        d["sky_color"] = tuple(d["sky_color"])
        return cls(**d)


class BackgroundLibrary:
    """Directory of raster images used as composite backgrounds."""

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.is_dir():
            raise BackgroundLibraryError(f"background library is not a directory: {self.path}")
        self.files = sorted(
            p for p in self.path.iterdir() if p.suffix.lower() in BACKGROUND_SUFFIXES
        )
        if not self.files:
            raise BackgroundLibraryError(f"no decodable images found in {self.path}")

    def __len__(self):
        return len(self.files)


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain; returns hull vertices in order."""
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and turn(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def turbine_screen_polygons(instance: TurbineInstance, pose: CameraPose) -> List[np.ndarray]:
    """Project a turbine's parts to 2D silhouette polygons.

    Vertices closer than the near plane are dropped per vertex, so a
    turbine straddling the camera plane still yields its visible part.
    """
    polys = []
    for pts in turbine_part_points(instance).values():
        cam = pose.world_to_camera(pts)
        cam = cam[cam[:, 2] >= NEAR_PLANE]
        if len(cam) < 3:
            continue
        cx, cy = pose.principal
        z = cam[:, 2]
        uv = np.column_stack(
            [cx + pose.focal_px * cam[:, 0] / z, cy + pose.focal_px * cam[:, 1] / z]
        )
        hull = _convex_hull(uv)
        if len(hull) >= 3:
            polys.append(hull)
    return polys


def _raster_coords(poly: np.ndarray, x0: float, y0: float, ss: int):
    # Clamped to keep pathological near-plane projections inside C int range;
    # in-frame geometry is unaffected.
    c = np.clip((poly - (x0, y0)) * ss, -_COORD_LIMIT, _COORD_LIMIT)
    return [(float(u), float(v)) for u, v in c]


def _turbine_alpha(
    polys: Sequence[np.ndarray], image_size: Tuple[int, int], ss: int
) -> Optional[Tuple[np.ndarray, Tuple[int, int]]]:
    """Supersampled coverage of one turbine inside its screen window.

    Returns (alpha in [0, 1] float32, (x0, y0) window origin) or None when
    the turbine covers no output pixel.
    """
    w, h = image_size
    us = np.concatenate([p[:, 0] for p in polys])
    vs = np.concatenate([p[:, 1] for p in polys])
    x0 = int(max(0.0, math.floor(us.min())))
    y0 = int(max(0.0, math.floor(vs.min())))
    x1 = int(min(float(w), math.ceil(us.max())))
    y1 = int(min(float(h), math.ceil(vs.max())))
    if x1 <= x0 or y1 <= y0:
        return None

    mask_img = Image.new("L", ((x1 - x0) * ss, (y1 - y0) * ss), 0)
    draw = ImageDraw.Draw(mask_img)
    for poly in polys:
        draw.polygon(_raster_coords(poly, x0, y0, ss), fill=255)
    if ss > 1:
        mask_img = mask_img.resize((x1 - x0, y1 - y0), Image.BOX)
    alpha = np.asarray(mask_img, dtype=np.float32) / np.float32(255.0)
    return alpha, (x0, y0)


def turbine_color(
    instance: TurbineInstance, depth_m: float, sun, options: RenderOptions
) -> np.ndarray:
    """Flat color for one turbine: sun-modulated base blended with haze."""
    altitude = math.radians(sun.altitude_deg)
    facing = math.cos(math.radians(instance.yaw_deg - sun.azimuth_deg))
    shade = options.sun_ambient + (1.0 - options.sun_ambient) * max(0.0, math.sin(altitude)) * (
        0.7 + 0.3 * facing
    )
    base = np.asarray(options.base_color, dtype=np.float64) * shade
    haze = min(1.0, sun.dust_density * depth_m / options.haze_max_depth_m)
    return base * (1.0 - haze) + np.asarray(options.sky_color, dtype=np.float64) * haze


def render_foreground(scene, pose: CameraPose, options: Optional[RenderOptions] = None) -> np.ndarray:
    """Render all turbines of a scene into an RGBA buffer.

    Turbines are painted back to front by hub depth; alpha is 255 on
    covered pixels and fractional only on anti-aliased edges.
    """
    options = options or RenderOptions()
    w, h = pose.image_size
    rgb = np.zeros((h, w, 3), dtype=np.float32)
    alpha = np.zeros((h, w), dtype=np.float32)

    def hub_depth(t):
        return float(pose.world_to_camera(rotor_center(t))[0, 2])

    for turbine in sorted(scene.turbines, key=hub_depth, reverse=True):
        polys = turbine_screen_polygons(turbine, pose)
        if not polys:
            continue
        cov = _turbine_alpha(polys, pose.image_size, options.supersample)
        if cov is None:
            continue
        a, (x0, y0) = cov
        ah, aw = a.shape
        color = turbine_color(turbine, hub_depth(turbine), scene.sun, options).astype(np.float32)
        win = np.s_[y0 : y0 + ah, x0 : x0 + aw]
        a3 = a[..., None]
        rgb[win] = color * a3 + rgb[win] * (1.0 - a3)
        alpha[win] = a + alpha[win] * (1.0 - a)

    # rgb accumulated premultiplied; emit straight alpha so the composite
    # step's fg*a + bg*(1-a) weights edge pixels once, not twice
    out = np.zeros((h, w, 4), dtype=np.uint8)
    covered = alpha > 0
    if covered.any():
        a_cov = alpha[covered]
        straight = rgb[covered] / a_cov[:, None]
        pixels = np.empty((len(a_cov), 4), dtype=np.uint8)
        pixels[:, :3] = np.clip(np.rint(straight), 0, 255)
        pixels[:, 3] = np.clip(np.rint(a_cov * 255.0), 0, 255)
        out[covered] = pixels
    return out


def noise_background(rng: np.random.Generator, image_size: Tuple[int, int]) -> np.ndarray:
    """Per-pixel independent uniform RGB noise image."""
    w, h = image_size
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def _crop_box(src_size, target_size, anchor):
    sw, sh = src_size
    tw, th = target_size
    aspect = tw / th
    crop_w = min(float(sw), sh * aspect)
    crop_h = crop_w / aspect
    fx, fy = anchor
    x0 = (sw - crop_w) * fx
    y0 = (sh - crop_h) * fy
    return (
        int(round(x0)),
        int(round(y0)),
        int(round(x0 + crop_w)),
        int(round(y0 + crop_h)),
    )


def load_background(
    library: Optional[BackgroundLibrary],
    choice,
    rng: np.random.Generator,
    image_size: Tuple[int, int],
) -> np.ndarray:
    """Produce the RGB background for one image.

    Noise choices (and any choice when no library is configured, the
    noise-only mode) return uniform per-pixel noise. Library choices crop
    the selected image to the output aspect at the sampled anchor and
    resize bilinearly. Corrupt files are skipped with a warning.
    """
    w, h = image_size
    if choice.kind == "noise" or library is None:
        return noise_background(rng, image_size)

    n = len(library)
    for attempt in range(n):
        path = library.files[(choice.image_index + attempt) % n]
        try:
            with Image.open(path) as im:
                src = im.convert("RGB")
        except Exception as exc:  # PIL raises a zoo of decode errors
            log.warning("skipping unreadable background %s: %s", path, exc)
            continue
        box = _crop_box(src.size, image_size, choice.crop_anchor)
        out = src.crop(box).resize((w, h), Image.BILINEAR)
        return np.asarray(out)
    raise BackgroundLibraryError(f"no readable background image in {library.path}")


def composite(foreground: np.ndarray, background: np.ndarray) -> np.ndarray:
    """Alpha-over: out = fg * a + bg * (1 - a), rounded to nearest."""
    fg = np.asarray(foreground)
    bg = np.asarray(background)
    if fg.ndim != 3 or fg.shape[2] != 4 or fg.dtype != np.uint8:
        raise ValueError("foreground must be uint8 RGBA")
    if bg.ndim != 3 or bg.shape[2] != 3 or bg.dtype != np.uint8:
        raise ValueError("background must be uint8 RGB")
    if fg.shape[:2] != bg.shape[:2]:
        raise ValueError(f"layer dimensions differ: {fg.shape[:2]} vs {bg.shape[:2]}")
    out = bg.copy()
    sel = fg[..., 3] > 0
    if sel.any():
        a = (fg[sel, 3:].astype(np.float32)) / np.float32(255.0)
        mixed = fg[sel, :3].astype(np.float32) * a + bg[sel].astype(np.float32) * (1.0 - a)
        out[sel] = np.clip(np.rint(mixed), 0, 255).astype(np.uint8)
    return out
