"""One-image generation: sample, render, augment, annotate.

``generate_image`` is a pure function of (master_seed, image_index,
config), which is what makes datasets reproducible regardless of worker
count or generation order.
"""

from __future__ import annotations

import functools
import struct
import zlib
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from PIL import Image

from .augment import apply_hsv, apply_noise, jpeg_roundtrip
from .camera import bbox_from_projection, camera_pose, project_points
from .config import GeneratorConfig
from .dataset import AnnotationRecord, pixel_hash, record_from_projection
from .render import BackgroundLibrary, composite, load_background, render_foreground, turbine_screen_polygons
from .sampling import STAGE_BACKGROUND, STAGE_NOISE, SceneConfig, derive_rng, sample_scene
from .scene import keypoints_world


@functools.lru_cache(maxsize=8)
def _cached_library(path: str) -> BackgroundLibrary:
    return BackgroundLibrary(path)


def open_library(path) -> Optional[BackgroundLibrary]:
    """Background library for a config path; None means noise-only mode."""
    if path is None:
        return None
    return _cached_library(str(path))


@dataclass
class ImageResult:
    buffer: np.ndarray  # final RGB pixels before file encoding
    records: List[AnnotationRecord]
    encoding: str  # "png" or "jpg"
    scene: SceneConfig
    noisy: bool = False  # high-entropy content; PNG compression is futile
    encoded: Optional[bytes] = None  # JPEG bytes the buffer was decoded from

    def pixel_sha256(self) -> str:
        return pixel_hash(self.buffer)

    def save_image(self, path) -> None:
        if self.encoding == "jpg" and self.encoded is not None:
            with open(path, "wb") as fh:
                fh.write(self.encoded)
            return
        img = Image.fromarray(self.buffer, "RGB")
        if self.encoding == "jpg":
            img.save(path, format="JPEG", quality=int(round(self.scene.augment.jpeg_quality)))
        elif self.noisy:
            # zlib spends ~10x longer on noise for the same file size
            _write_png_stored(path, self.buffer)
        else:
            img.save(path, format="PNG", compress_level=1)


def _png_chunk(kind: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + kind
        + payload
        + struct.pack(">I", zlib.crc32(kind + payload))
    )


def _write_png_stored(path, rgb: np.ndarray) -> None:
    """Minimal RGB8 PNG with uncompressed (stored) zlib blocks.

    For high-entropy frames compression gains nothing, so this trades file
    size parity for a large encode-speed win over the usual encoders.
    """
    h, w, _ = rgb.shape
    rows = np.empty((h, 1 + w * 3), dtype=np.uint8)
    rows[:, 0] = 0  # per-scanline filter byte: None
    rows[:, 1:] = rgb.reshape(h, w * 3)
    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_png_chunk(b"IHDR", header))
        fh.write(_png_chunk(b"IDAT", zlib.compress(rows.tobytes(), 0)))
        fh.write(_png_chunk(b"IEND", b""))


def annotate_scene(scene: SceneConfig, pose=None) -> List[AnnotationRecord]:
    """Boxes and keypoints for every turbine whose silhouette is in frame.

    Turbines with no usable box are omitted (the image is still a valid
    negative example).
    """
    pose = pose or camera_pose(scene.camera)
    size = pose.image_size
    records = []
    for turbine in scene.turbines:
        polys = turbine_screen_polygons(turbine, pose)
        bbox = bbox_from_projection(polys, size)
        if bbox is None:
            continue
        pixels = project_points(keypoints_world(turbine).points, pose)
        records.append(record_from_projection(bbox, pixels, size))
    return records


def generate_image(
    master_seed: int,
    image_index: int,
    config: GeneratorConfig,
    library: Optional[BackgroundLibrary] = None,
) -> ImageResult:
    """Produce one annotated image. Augmentation order is fixed:
    HSV on the foreground, HSV on the background, composite, noise, JPEG.
    """
    scene = sample_scene(master_seed, image_index, config)
    pose = camera_pose(scene.camera)

    fg = render_foreground(scene, pose, config.render)
    bg = load_background(
        library,
        scene.background,
        derive_rng(master_seed, image_index, STAGE_BACKGROUND),
        tuple(config.image_size),
    )

    fg = apply_hsv(fg, fg[..., 3], scene.augment.hsv_fg)
    bg = apply_hsv(bg, None, scene.augment.hsv_bg)
    img = composite(fg, bg)

    plan = scene.augment
    if plan.noise_sigma is not None:
        img = apply_noise(
            img, plan.noise_mean, plan.noise_sigma, derive_rng(master_seed, image_index, STAGE_NOISE)
        )
    encoded = None
    if plan.jpeg_quality is not None:
        img, encoded = jpeg_roundtrip(img, plan.jpeg_quality)
        encoding = "jpg"
    else:
        encoding = "png"

    return ImageResult(
        buffer=img,
        records=annotate_scene(scene, pose),
        encoding=encoding,
        scene=scene,
        noisy=plan.noise_sigma is not None or scene.background.kind == "noise" or library is None,
        encoded=encoded,
    )
