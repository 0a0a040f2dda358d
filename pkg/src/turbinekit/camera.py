"""Pinhole camera: pose construction, 3D->2D projection, visibility, boxes.

Camera frame follows the usual computer-vision convention: x right,
y down, z forward (optical axis). Pixel (0, 0) is the top-left image
corner; u grows right, v grows down. The camera sits on the world -y
axis at ``(0, -distance, height)`` and looks toward +y.

Pitch is normally not sampled: it is derived so that a fixed aim point
(default ``(0, 0, 89)``) lands on the image's horizontal center row.
With hub centering enabled the camera is aimed straight at the
designated hub instead. Roll is applied last, about the optical axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

DEFAULT_IMAGE_SIZE = (1280, 720)
DEFAULT_SENSOR_WIDTH_MM = 36.0
DEFAULT_AIM_POINT = (0.0, 0.0, 89.0)

_WORLD_UP = np.array([0.0, 0.0, 1.0])

# Geometry closer than this to the camera plane is clipped away (meters).
NEAR_PLANE = 0.1


class PixelPoint(NamedTuple):
    u: float
    v: float
    depth: float


@dataclass
class CameraConfig:
    distance_m: float = 100.0
    height_m: float = 89.0
    focal_length_mm: float = 24.0
    roll_deg: float = 0.0
    pitch_deg: Optional[float] = None  # None: derived from the aim point
    yaw_deg: float = 0.0
    center_on_hub: bool = False
    aim_point: Tuple[float, float, float] = DEFAULT_AIM_POINT
    sensor_width_mm: float = DEFAULT_SENSOR_WIDTH_MM
    image_size: Tuple[int, int] = DEFAULT_IMAGE_SIZE

    def __post_init__(self):
        if self.focal_length_mm <= 0:
            raise ValueError("focal length must be > 0")
        if self.sensor_width_mm <= 0:
            raise ValueError("sensor width must be > 0")
        w, h = self.image_size
        if w <= 0 or h <= 0:
            raise ValueError("image dimensions must be > 0")
        if self.pitch_deg is not None and not math.isfinite(self.pitch_deg):
            raise ValueError("pitch must be finite")

    def to_dict(self) -> dict:
        return {
            "distance_m": self.distance_m,
            "height_m": self.height_m,
            "focal_length_mm": self.focal_length_mm,
            "roll_deg": self.roll_deg,
            "pitch_deg": self.pitch_deg,
            "yaw_deg": self.yaw_deg,
            "center_on_hub": self.center_on_hub,
            "aim_point": list(self.aim_point),
            "sensor_width_mm": self.sensor_width_mm,
            "image_size": list(self.image_size),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraConfig":
        d = dict(d)
        d["aim_point"] = tuple(d["aim_point"])
        d["image_size"] = tuple(d["image_size"])
        return cls(**d)


@dataclass
class CameraPose:
    """World->camera transform plus pixel intrinsics."""

    rotation: np.ndarray  # (3, 3), rows are camera right / down / forward
    position: np.ndarray  # (3,) camera center in world coordinates
    focal_px: float
    principal: Tuple[float, float]
    image_size: Tuple[int, int]

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.position) @ self.rotation.T


def derived_pitch_deg(height_m: float, distance_m: float, aim_height_m: float = 89.0) -> float:
    """Pitch that puts the aim height on the image center row."""
    return math.degrees(math.atan2(aim_height_m - height_m, distance_m))


def camera_pose(config: CameraConfig) -> CameraPose:
    if config.distance_m <= 0:
        raise ValueError("camera distance must be > 0")
    position = np.array([0.0, -config.distance_m, config.height_m])

    if config.center_on_hub:
        forward = np.asarray(config.aim_point, dtype=float) - position
        n = np.linalg.norm(forward)
        if n == 0:
            raise ValueError("camera cannot be aimed at its own position")
        forward = forward / n
    else:
        if config.pitch_deg is not None:
            pitch = math.radians(config.pitch_deg)
        else:
            pitch = math.atan2(config.aim_point[2] - config.height_m, config.distance_m)
        yaw = math.radians(config.yaw_deg)
        cp = math.cos(pitch)
        forward = np.array([-math.sin(yaw) * cp, math.cos(yaw) * cp, math.sin(pitch)])

    right = np.cross(forward, _WORLD_UP)
    n = np.linalg.norm(right)
    if n < 1e-12:
        # looking straight up/down: fall back to world +x as image right
        right = np.array([1.0, 0.0, 0.0])
    else:
        right = right / n
    down = np.cross(forward, right)

    roll = math.radians(config.roll_deg)
    if roll != 0.0:
        c, s = math.cos(roll), math.sin(roll)
        right, down = right * c + down * s, -right * s + down * c

    w, h = config.image_size
    focal_px = config.focal_length_mm * w / config.sensor_width_mm
    return CameraPose(
        rotation=np.vstack([right, down, forward]),
        position=position,
        focal_px=focal_px,
        principal=(w / 2.0, h / 2.0),
        image_size=(int(w), int(h)),
    )


def project(point, pose: CameraPose) -> Optional[PixelPoint]:
    """Project one world point; None when the point is behind the camera."""
    pc = pose.world_to_camera(point)[0]
    if pc[2] <= 0:
        return None
    cx, cy = pose.principal
    return PixelPoint(
        u=cx + pose.focal_px * pc[0] / pc[2],
        v=cy + pose.focal_px * pc[1] / pc[2],
        depth=float(pc[2]),
    )


def project_points(points: np.ndarray, pose: CameraPose) -> List[Optional[PixelPoint]]:
    pc = pose.world_to_camera(points)
    cx, cy = pose.principal
    out: List[Optional[PixelPoint]] = []
    for x, y, z in pc:
        if z <= 0:
            out.append(None)
        else:
            out.append(PixelPoint(cx + pose.focal_px * x / z, cy + pose.focal_px * y / z, float(z)))
    return out


def keypoint_visibility(pixel: Optional[PixelPoint], image_size: Tuple[int, int]) -> int:
    """2 when in-frame with positive depth, else 0."""
    if pixel is None:
        return 0
    w, h = image_size
    if 0.0 <= pixel.u < w and 0.0 <= pixel.v < h and pixel.depth > 0:
        return 2
    return 0


def clip_polygon_near(points_cam: np.ndarray, z_near: float = NEAR_PLANE) -> np.ndarray:
    """Clip a camera-frame polygon against the plane z = z_near.

    Sutherland-Hodgman against a single plane; returns (M, 3), possibly
    empty. Keeps partially visible geometry so straddling turbines still
    project and get boxed.
    """
    out = []
    n = len(points_cam)
    for i in range(n):
        a = points_cam[i]
        b = points_cam[(i + 1) % n]
        a_in = a[2] >= z_near
        b_in = b[2] >= z_near
        if a_in:
            out.append(a)
        if a_in != b_in:
            t = (z_near - a[2]) / (b[2] - a[2])
            out.append(a + t * (b - a))
    return np.array(out) if out else np.empty((0, 3))


def project_polygon(points_world: np.ndarray, pose: CameraPose) -> np.ndarray:
    """Project a world polygon to pixel coordinates with near-plane clipping.

    Returns (M, 2) pixel vertices; empty when fully behind the camera.
    """
    clipped = clip_polygon_near(pose.world_to_camera(points_world))
    if len(clipped) == 0:
        return np.empty((0, 2))
    cx, cy = pose.principal
    z = clipped[:, 2]
    return np.column_stack(
        [cx + pose.focal_px * clipped[:, 0] / z, cy + pose.focal_px * clipped[:, 1] / z]
    )


def bbox_from_projection(vertices, image_size: Tuple[int, int]) -> Optional[Tuple[float, float, float, float]]:
    """Tight axis-aligned box over in-front vertices, clipped to the frame.

    ``vertices`` may contain PixelPoints, None markers or (N, 2) arrays.
    Returns (x1, y1, x2, y2) or None when the clipped box is empty or
    degenerate (either side under 2 px).
    """
    us, vs = [], []
    for item in vertices:
        if item is None:
            continue
        arr = np.asarray(item, dtype=float)
        if arr.ndim == 1:
            if len(arr) >= 3 and arr[2] <= 0:
                continue
            us.append(arr[0])
            vs.append(arr[1])
        elif arr.size:
            us.extend(arr[:, 0])
            vs.extend(arr[:, 1])
    if not us:
        return None
    w, h = image_size
    x1 = max(0.0, min(us))
    y1 = max(0.0, min(vs))
    x2 = min(float(w), max(us))
    y2 = min(float(h), max(vs))
    if x2 - x1 < 2.0 or y2 - y1 < 2.0:
        return None
    return (x1, y1, x2, y2)
