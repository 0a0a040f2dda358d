"""Post-render augmentations: per-layer HSV shifts, JPEG artifacts, pixel noise.

The augmentation order is fixed across the pipeline: HSV shift on the
foreground layer, HSV shift on the background layer, alpha compositing,
Gaussian pixel noise, then JPEG. One HSV shift applies uniformly to every
pixel of its layer. Hue is in degrees and wraps; saturation is additive on
the 0-255 scale; value is a multiplicative factor.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

import numpy as np
from PIL import Image

from . import _hsvkernel


@dataclass(frozen=True)
class HsvShift:
    hue_deg: float = 0.0
    saturation: float = 0.0
    value_factor: float = 1.0

    def __post_init__(self):
        if self.value_factor <= 0:
            raise ValueError("value factor must be > 0")

    def to_dict(self) -> dict:
        return {
            "hue_deg": self.hue_deg,
            "saturation": self.saturation,
            "value_factor": self.value_factor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HsvShift":
        return cls(**d)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV. Input float (..., 3) in [0, 255].

    H in [0, 360), S and V in [0, 255]. Hue ties resolve in r, g, b order,
    matching the classic colorsys sector chain. Written to avoid np.mod
    (the sector values are already bounded), which matters on full frames.
    """
    rgb = np.asarray(rgb)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    delta = maxc - minc
    tiny = np.finfo(rgb.dtype if rgb.dtype.kind == "f" else np.float64).tiny
    safe = np.maximum(delta, tiny)

    t = (g - b) / safe  # in [-1, 1] where max is r
    hue = np.where(
        maxc == r,
        np.where(t < 0, t + 6.0, t),
        np.where(maxc == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    hue = np.where(delta > 0, hue * 60.0, 0.0)
    sat = np.where(maxc > 0, delta / np.maximum(maxc, tiny) * 255.0, 0.0)

    out = np.empty(np.broadcast(r, g, b).shape + (3,), dtype=np.result_type(rgb, np.float32))
    out[..., 0] = hue
    out[..., 1] = sat
    out[..., 2] = maxc
    return out


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_hsv; returns float (..., 3) in [0, 255].

    Uses the branchless sector formula: for channel offset n,
    value - value * sat * clamp(min(k, 4 - k), 0, 1) with
    k = (n + hue / 60) mod 6.
    """
    hsv = np.asarray(hsv)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    s01 = s / 255.0
    h60 = (h % 360.0) / 60.0

    def channel(n):
        k = n + h60  # in [1, 11); cheaper than a float mod
        k = np.where(k >= 6.0, k - 6.0, k)
        return v - v * s01 * np.clip(np.minimum(k, 4.0 - k), 0.0, 1.0)

    out = np.empty(np.broadcast(h, s, v).shape + (3,), dtype=np.result_type(hsv, np.float32))
    out[..., 0] = channel(5.0)
    out[..., 1] = channel(3.0)
    out[..., 2] = channel(1.0)
    return out


# Chunk size for the fused shift: keeps the ~9 working arrays inside L2,
# which is what bounds throughput on full frames.
_HSV_CHUNK = 1 << 16


def _shift_chunk(rgb_u8: np.ndarray, shift: HsvShift, out_u8: np.ndarray) -> None:
    """Fused convert-shift-convert on a flat (n, 3) uint8 chunk, in place.

    Same math as rgb_to_hsv / hsv_to_rgb (float32), written with in-place
    ops; the reference conversions stay the readable spec of the formulas.
    """
    f32 = np.float32
    r = rgb_u8[:, 0].astype(f32)
    g = rgb_u8[:, 1].astype(f32)
    b = rgb_u8[:, 2].astype(f32)

    maxc = np.maximum(r, g)
    np.maximum(maxc, b, out=maxc)
    minc = np.minimum(r, g)
    np.minimum(minc, b, out=minc)
    delta = np.subtract(maxc, minc, out=minc)
    tiny = np.finfo(f32).tiny
    safe = np.maximum(delta, tiny)

    # hue sectors; gray pixels fall through the r-branch with hue 0
    t_r = np.subtract(g, b)
    np.divide(t_r, safe, out=t_r)
    t_r[t_r < 0] += 6.0
    t_g = np.subtract(b, r)
    np.divide(t_g, safe, out=t_g)
    t_g += 2.0
    t_b = np.subtract(r, g)
    np.divide(t_b, safe, out=t_b)
    t_b += 4.0
    hue = np.where(maxc == r, t_r, np.where(maxc == g, t_g, t_b))
    hue *= 60.0

    hue += f32(shift.hue_deg % 360.0)
    hue[hue >= 360.0] -= 360.0

    sat = np.divide(delta, np.maximum(maxc, tiny))
    sat *= 255.0
    sat += f32(shift.saturation)
    np.clip(sat, 0.0, 255.0, out=sat)

    v = maxc
    v *= f32(shift.value_factor)
    np.clip(v, 0.0, 255.0, out=v)

    sat /= 255.0
    hue /= 60.0
    for col, n in ((0, 5.0), (1, 3.0), (2, 1.0)):
        k = hue + f32(n)
        k[k >= 6.0] -= 6.0
        lim = np.subtract(f32(4.0), k)
        np.minimum(k, lim, out=k)
        np.clip(k, 0.0, 1.0, out=k)
        k *= sat
        np.subtract(f32(1.0), k, out=k)
        k *= v
        np.rint(k, out=k)
        np.clip(k, 0.0, 255.0, out=k)
        out_u8[:, col] = k


def apply_hsv(image: np.ndarray, mask: Optional[np.ndarray], shift: HsvShift) -> np.ndarray:
    """Apply one HSV shift to a whole layer, optionally only where mask > 0.

    ``image`` is uint8 RGB or RGBA; an RGBA alpha channel passes through
    unchanged. ``mask`` (when given) must match the image height/width.
    """
    img = np.asarray(image)
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] not in (3, 4):
        raise ValueError("expected uint8 RGB or RGBA image")
    if mask is not None and mask.shape[:2] != img.shape[:2]:
        raise ValueError("mask dimensions must match the image")

    out = img.copy()
    rgb = img[..., :3]
    if mask is not None:
        sel = mask > 0
        if not sel.any():
            return out
        flat = np.ascontiguousarray(rgb[sel])
    else:
        flat = np.ascontiguousarray(rgb.reshape(-1, 3))

    shifted = np.empty_like(flat)
    if _hsvkernel.HAVE_NUMBA:
        _hsvkernel.hsv_shift_u8(
            flat,
            np.float32(shift.hue_deg % 360.0),
            np.float32(shift.saturation),
            np.float32(shift.value_factor),
            shifted,
        )
    else:
        for start in range(0, len(flat), _HSV_CHUNK):
            stop = start + _HSV_CHUNK
            _shift_chunk(flat[start:stop], shift, shifted[start:stop])

    if mask is not None:
        out_rgb = out[..., :3]
        out_rgb[sel] = shifted
    else:
        out[..., :3] = shifted.reshape(rgb.shape)
    return out


def jpeg_roundtrip(image: np.ndarray, quality: float) -> tuple:
    """Encode to baseline JPEG and decode back; returns (pixels, bytes).

    Quality is rounded to the nearest integer before encoding. The encoded
    bytes are returned so a writer can persist exactly what the pixels
    decode from instead of paying for a second encode.
    """
    img = np.asarray(image)
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("expected uint8 RGB image")
    q = int(round(quality))
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="JPEG", quality=q)
    data = buf.getvalue()
    return np.asarray(Image.open(io.BytesIO(data)).convert("RGB")), data


def apply_jpeg(image: np.ndarray, quality: float) -> np.ndarray:
    """Round-trip the image through a baseline JPEG encoder."""
    return jpeg_roundtrip(image, quality)[0]


def apply_noise(image: np.ndarray, mean: float, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add independent per-pixel, per-channel Gaussian noise (rounded, clamped)."""
    if sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    img = np.asarray(image)
    if img.dtype != np.uint8:
        raise ValueError("expected a uint8 image")
    if sigma == 0 and mean == 0:
        return img.copy()
    noise = rng.standard_normal(size=img.shape, dtype=np.float32)
    noise *= np.float32(sigma)
    if mean:
        noise += np.float32(mean)
    np.rint(noise, out=noise)
    summed = img.astype(np.int16)
    summed += noise.astype(np.int16)
    return np.clip(summed, 0, 255, out=summed).astype(np.uint8)
