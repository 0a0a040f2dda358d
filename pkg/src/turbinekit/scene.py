"""Parametric wind-turbine geometry and world-frame keypoints.

Coordinate conventions used throughout the package:

* World frame: right-handed, z up, ground plane at z = 0. A turbine's
  tower axis is vertical at its (x, y) position.
* Yaw ``psi`` rotates the nacelle about the tower axis. ``psi = 0`` points
  the rotor axis along world +y; positive yaw is a right-handed rotation
  about +z (counterclockwise seen from above).
* Blade angle is measured from straight up (12 o'clock) and increases
  clockwise when the rotor is viewed from its front (upwind) side. The
  three blades sit at ``phi``, ``phi + 120`` and ``phi + 240`` degrees.
* Tip labels: the blade whose angle falls in [0, 120) is tip 1, [120, 240)
  is tip 2, [240, 360) is tip 3. Segments are half-open and fixed to the
  world vertical.

The 7 keypoints are ordered: tip1, tip2, tip3, hub_front, hub_rear,
tower_top, tower_bottom. Visibility flags are 0 (not labeled) or 2
(labeled and visible).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

KEYPOINT_NAMES = (
    "tip1",
    "tip2",
    "tip3",
    "hub_front",
    "hub_rear",
    "tower_top",
    "tower_bottom",
)

VIS_NOT_LABELED = 0
VIS_VISIBLE = 2

TIP_SEGMENT_DEG = 120.0


@dataclass(frozen=True)
class TurbineGeometry:
    """Dimensions of one turbine model, all in meters."""

    hub_height: float = 89.0
    blade_length: float = 55.0
    blade_root_width: float = 3.2
    blade_tip_width: float = 0.6
    tower_base_radius: float = 2.6
    tower_top_radius: float = 1.5
    nacelle_length: float = 12.0
    nacelle_width: float = 4.0
    nacelle_height: float = 4.0
    hub_front_offset: float = 7.0
    hub_rear_offset: float = 4.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) <= 0:
                raise ValueError(f"geometry dimension {name!r} must be > 0")
        if self.blade_length >= self.hub_height:
            raise ValueError(
                "blade_length must be smaller than hub_height "
                f"(got {self.blade_length} >= {self.hub_height})"
            )
        if self.hub_front_offset <= self.hub_rear_offset:
            raise ValueError("hub_front_offset must exceed hub_rear_offset")

    def scaled(self, factor: float) -> "TurbineGeometry":
        """Uniformly scaled copy; used for the turbine size variants."""
        if factor <= 0:
            raise ValueError("scale factor must be > 0")
        return replace(
            self,
            **{name: getattr(self, name) * factor for name in self.__dataclass_fields__},
        )

    def to_dict(self) -> Dict[str, float]:
        return {name: float(getattr(self, name)) for name in self.__dataclass_fields__}


DEFAULT_GEOMETRY = TurbineGeometry()


def normalize_angle(deg: float) -> float:
    """Map an angle to [0, 360)."""
    a = float(deg) % 360.0
    return a if a != 360.0 else 0.0


@dataclass(frozen=True)
class TurbineInstance:
    """One turbine in the scene: ground position, pose angles and geometry."""

    position: tuple  # (x, y) meters in the ground plane
    yaw_deg: float
    blade_rotation_deg: float
    geometry: TurbineGeometry = DEFAULT_GEOMETRY

    def __post_init__(self):
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "yaw_deg", normalize_angle(self.yaw_deg))
        object.__setattr__(self, "blade_rotation_deg", normalize_angle(self.blade_rotation_deg))

    def to_dict(self) -> dict:
        return {
            "position": [self.position[0], self.position[1]],
            "yaw_deg": self.yaw_deg,
            "blade_rotation_deg": self.blade_rotation_deg,
            "geometry": self.geometry.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TurbineInstance":
        return cls(
            position=tuple(d["position"]),
            yaw_deg=d["yaw_deg"],
            blade_rotation_deg=d["blade_rotation_deg"],
            geometry=TurbineGeometry(**d["geometry"]),
        )


@dataclass
class KeypointSet:
    """The 7 named keypoints with visibility flags.

    ``points`` is (7, 3) in world meters or (7, 2) in pixels depending on
    ``frame``; row order follows KEYPOINT_NAMES (tips at rows 0-2).
    """

    points: np.ndarray
    visibility: np.ndarray
    frame: str = "world"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.visibility = np.asarray(self.visibility, dtype=int)
        if self.points.shape[0] != 7 or self.visibility.shape != (7,):
            raise ValueError("a keypoint set holds exactly 7 points")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.points[KEYPOINT_NAMES.index(name)]

    @property
    def tips(self) -> np.ndarray:
        return self.points[:3]


def rotor_forward(yaw_deg: float) -> np.ndarray:
    """Unit vector of the nacelle/rotor axis for a given yaw."""
    r = np.radians(yaw_deg)
    return np.array([-np.sin(r), np.cos(r), 0.0])


def blade_direction(yaw_deg: float, angle_deg: float) -> np.ndarray:
    """Unit vector from rotor center toward a blade tip.

    ``angle_deg`` follows the clock convention in the module docstring:
    0 is straight up, 90 is the front viewer's right.
    """
    fwd = rotor_forward(yaw_deg)
    up = np.array([0.0, 0.0, 1.0])
    # screen-right for a viewer standing upwind looking back at the rotor
    right = np.cross(-fwd, up)
    a = np.radians(angle_deg)
    return up * np.cos(a) + right * np.sin(a)


def blade_tip_angles(blade_rotation_deg: float) -> np.ndarray:
    """Angles of the three blades, in sampling order (not label order)."""
    base = normalize_angle(blade_rotation_deg)
    return np.array([normalize_angle(base + TIP_SEGMENT_DEG * k) for k in range(3)])


def assign_tip_labels(tip_angles_deg) -> tuple:
    """Map three blade angles onto tip labels (1, 2, 3) by angular segment.

    Returns a tuple ``labels`` where ``labels[i]`` is the label of the blade
    at ``tip_angles_deg[i]``. The blades must be mutually 120 degrees apart
    (mod 360); anything else signals corrupted scene state and raises.
    """
    angles = np.array([normalize_angle(a) for a in tip_angles_deg], dtype=float)
    if angles.shape != (3,):
        raise ValueError("expected exactly 3 blade angles")
    ordered = np.sort(angles)
    gaps = np.diff(np.concatenate([ordered, [ordered[0] + 360.0]]))
    if not np.allclose(gaps, TIP_SEGMENT_DEG, atol=1e-6):
        raise ValueError(f"blade angles are not 120 degrees apart: {angles.tolist()}")
    labels = tuple(int(a // TIP_SEGMENT_DEG) + 1 for a in angles)
    if sorted(labels) != [1, 2, 3]:
        raise ValueError(f"blade angles do not map to one tip per segment: {angles.tolist()}")
    return labels


def rotor_center(instance: TurbineInstance) -> np.ndarray:
    """Center of the rotor plane: hub midpoint along the nacelle axis."""
    g = instance.geometry
    x, y = instance.position
    top = np.array([x, y, g.hub_height])
    offset = 0.5 * (g.hub_front_offset + g.hub_rear_offset)
    return top + rotor_forward(instance.yaw_deg) * offset


def keypoints_world(instance: TurbineInstance) -> KeypointSet:
    """Compute the 7 keypoints of a turbine in world coordinates.

    Tips are stored in label order (tip1 first), so the row order already
    reflects the angular-segment labeling.
    """
    g = instance.geometry
    x, y = instance.position
    fwd = rotor_forward(instance.yaw_deg)
    top = np.array([x, y, g.hub_height])

    center = rotor_center(instance)
    angles = blade_tip_angles(instance.blade_rotation_deg)
    labels = assign_tip_labels(angles)
    tips = np.zeros((3, 3))
    for angle, label in zip(angles, labels):
        tips[label - 1] = center + g.blade_length * blade_direction(instance.yaw_deg, angle)

    points = np.vstack(
        [
            tips,
            top + fwd * g.hub_front_offset,
            top + fwd * g.hub_rear_offset,
            top,
            np.array([x, y, 0.0]),
        ]
    )
    return KeypointSet(points=points, visibility=np.full(7, VIS_VISIBLE), frame="world")


def turbine_part_points(instance: TurbineInstance) -> Dict[str, np.ndarray]:
    """3D vertex sets of the simplified solid parts, keyed by part name.

    Each part is convex, so its screen silhouette is the convex hull of its
    projected vertices. The blades are flat tapered quads in the rotor
    plane; tower and nacelle are boxes; the hub is a nose point plus a ring
    where it meets the nacelle.
    """
    g = instance.geometry
    x, y = instance.position
    yaw = instance.yaw_deg
    fwd = rotor_forward(yaw)
    up = np.array([0.0, 0.0, 1.0])
    side = np.cross(fwd, up)  # horizontal, perpendicular to the rotor axis

    parts: Dict[str, np.ndarray] = {}

    base = np.array([x, y, 0.0])
    top = np.array([x, y, g.hub_height])
    tower = []
    for center, r in ((base, g.tower_base_radius), (top, g.tower_top_radius)):
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                tower.append(center + side * (sx * r) + fwd * (sy * r))
    parts["tower"] = np.array(tower)

    nacelle = []
    front = g.hub_rear_offset
    back = g.hub_rear_offset - g.nacelle_length
    for a in (back, front):
        for sw in (-1.0, 1.0):
            for sh in (-1.0, 1.0):
                nacelle.append(
                    top + fwd * a + side * (sw * g.nacelle_width / 2) + up * (sh * g.nacelle_height / 2)
                )
    parts["nacelle"] = np.array(nacelle)

    hub_radius = 0.45 * g.nacelle_height
    ring_center = top + fwd * g.hub_rear_offset
    ring_angles = np.radians(np.arange(0.0, 360.0, 60.0))
    ring = [
        ring_center + hub_radius * (up * np.cos(a) + side * np.sin(a))
        for a in ring_angles
    ]
    parts["hub"] = np.array([top + fwd * g.hub_front_offset] + ring)

    center = rotor_center(instance)
    for k, angle in enumerate(blade_tip_angles(instance.blade_rotation_deg)):
        d = blade_direction(yaw, angle)
        w = blade_direction(yaw, angle + 90.0)
        root = center
        tip = center + d * g.blade_length
        parts[f"blade{k}"] = np.array(
            [
                root - w * (g.blade_root_width / 2),
                root + w * (g.blade_root_width / 2),
                tip + w * (g.blade_tip_width / 2),
                tip - w * (g.blade_tip_width / 2),
            ]
        )
    return parts
