"""Excavator manipulator: geometry fixture, forward kinematics, Jacobians.

Base frame: origin at the swing pin on the ground, x toward the rear of the
machine (the workspace is at negative x), z up, angles CCW from +x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np
import yaml

from . import geom2d


class GeometryError(ValueError):
    """Raised for invalid geometry fixtures or out-of-limit extensions."""


@dataclass(frozen=True)
class ActuatorMap:
    """Affine extension -> joint angle map with extension limits."""

    intercept: float
    slope: float
    ext_min: float
    ext_max: float

    def angle(self, ext: float) -> float:
        return self.intercept + self.slope * ext

    def clamp(self, ext: float) -> float:
        return min(max(ext, self.ext_min), self.ext_max)


@dataclass(frozen=True)
class ExcavatorGeometry:
    base_anchor: np.ndarray
    link_lengths: tuple[float, float, float]
    actuator_maps: tuple[ActuatorMap, ActuatorMap, ActuatorMap]
    bucket_polygon: np.ndarray
    max_speeds: np.ndarray
    machine_mass: float
    track_half_length: float
    track_half_width: float
    bucket_width: float
    link_masses: tuple[float, float, float]
    reference_pose: np.ndarray
    bucket_plates: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        for m in self.actuator_maps:
            if m.slope == 0.0:
                raise GeometryError("actuator map slope must be nonzero")
            if not m.ext_min < m.ext_max:
                raise GeometryError("actuator extension limits are inverted")
        if not geom2d.is_simple(self.bucket_polygon):
            raise GeometryError("bucket polygon must be simple")
        if abs(geom2d.polygon_area(self.bucket_polygon)) < 1e-9:
            raise GeometryError("bucket polygon has zero area")
        if not self.bucket_plates:
            object.__setattr__(
                self, "bucket_plates", geom2d.convex_decompose(self.bucket_polygon)
            )

    @cached_property
    def ext_limits(self) -> np.ndarray:
        return np.array([[m.ext_min, m.ext_max] for m in self.actuator_maps])

    @cached_property
    def bucket_centroid_local(self) -> np.ndarray:
        return geom2d.polygon_centroid(self.bucket_polygon)

    def clamp_extensions(self, ext: np.ndarray) -> np.ndarray:
        lim = self.ext_limits
        return np.clip(ext, lim[:, 0], lim[:, 1])


@dataclass(frozen=True)
class FkResult:
    bucket_center: np.ndarray
    bucket_polygon_world: np.ndarray
    joint_angles: np.ndarray
    joint_points: np.ndarray          # anchor, boom tip, arm tip (bucket joint)
    bucket_plates_world: list
    bucket_frame_angle: float


def load_geometry(path=None) -> ExcavatorGeometry:
    """Load the geometry fixture; defaults to the packaged geometry.cfg."""
    if path is None:
        text = resources.files("rockcap.data").joinpath("geometry.cfg").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = yaml.safe_load(text)
    try:
        maps = tuple(
            ActuatorMap(
                intercept=float(raw["actuator_maps"][k]["intercept"]),
                slope=float(raw["actuator_maps"][k]["slope"]),
                ext_min=float(raw["actuator_maps"][k]["ext_min"]),
                ext_max=float(raw["actuator_maps"][k]["ext_max"]),
            )
            for k in ("boom", "arm", "bucket")
        )
        geo = ExcavatorGeometry(
            base_anchor=np.array(raw["base_anchor"], dtype=float),
            link_lengths=(
                float(raw["link_lengths"]["boom"]),
                float(raw["link_lengths"]["arm"]),
                float(raw["link_lengths"]["bucket"]),
            ),
            actuator_maps=maps,
            bucket_polygon=np.array(raw["bucket_polygon"], dtype=float),
            max_speeds=np.array(raw["max_speeds"], dtype=float),
            machine_mass=float(raw["machine_mass"]),
            track_half_length=float(raw["track_half_length"]),
            track_half_width=float(raw["track_half_width"]),
            bucket_width=float(raw["bucket_width"]),
            link_masses=tuple(float(v) for v in raw["link_masses"]),
            reference_pose=np.array(raw["reference_pose"], dtype=float),
        )
    except KeyError as exc:
        raise GeometryError(f"geometry fixture missing key: {exc}") from exc
    return geo


def joint_angles(geometry: ExcavatorGeometry, ext: np.ndarray) -> np.ndarray:
    """Absolute world angles of boom, arm and bucket links."""
    m1, m2, m3 = geometry.actuator_maps
    t1 = m1.angle(ext[0])
    t2 = t1 + m2.angle(ext[1])
    t3 = t2 + m3.angle(ext[2])
    return np.array([t1, t2, t3])


def forward_kinematics(geometry: ExcavatorGeometry, ext: np.ndarray) -> FkResult:
    ext = np.asarray(ext, dtype=float)
    lim = geometry.ext_limits
    if np.any(ext < lim[:, 0] - 1e-9) or np.any(ext > lim[:, 1] + 1e-9):
        raise GeometryError(f"extensions {ext} outside limits {lim.tolist()}")
    t = joint_angles(geometry, ext)
    L1, L2, L3 = geometry.link_lengths
    p0 = geometry.base_anchor
    p1 = p0 + L1 * np.array([math.cos(t[0]), math.sin(t[0])])
    p2 = p1 + L2 * np.array([math.cos(t[1]), math.sin(t[1])])
    poly = geom2d.transform(geometry.bucket_polygon, p2, t[2])
    plates = [geom2d.transform(pl, p2, t[2]) for pl in geometry.bucket_plates]
    center = geom2d.polygon_centroid(poly)
    return FkResult(
        bucket_center=center,
        bucket_polygon_world=poly,
        joint_angles=t,
        joint_points=np.array([p0, p1, p2]),
        bucket_plates_world=plates,
        bucket_frame_angle=t[2],
    )


def bucket_motion(
    geometry: ExcavatorGeometry, ext: np.ndarray, ext_vel: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Linear velocity of the bucket joint, its position, and the bucket
    angular velocity, from actuator rates."""
    m1, m2, m3 = geometry.actuator_maps
    t = joint_angles(geometry, ext)
    L1, L2, _ = geometry.link_lengths
    w1 = m1.slope * ext_vel[0]
    w2 = w1 + m2.slope * ext_vel[1]
    w3 = w2 + m3.slope * ext_vel[2]
    p0 = geometry.base_anchor
    p1 = p0 + L1 * np.array([math.cos(t[0]), math.sin(t[0])])
    p2 = p1 + L2 * np.array([math.cos(t[1]), math.sin(t[1])])
    # v = sum of omega x r contributions for a planar chain
    v1 = w1 * np.array([-(p1 - p0)[1], (p1 - p0)[0]])
    v2 = v1 + w2 * np.array([-(p2 - p1)[1], (p2 - p1)[0]])
    return v2, p2, w3


def point_velocity(ref_point: np.ndarray, ref_vel: np.ndarray, omega: float,
                   point: np.ndarray) -> np.ndarray:
    r = point - ref_point
    return ref_vel + omega * np.array([-r[1], r[0]])


def bucket_center_jacobian(geometry: ExcavatorGeometry, ext: np.ndarray) -> np.ndarray:
    """3x2 Jacobian d(bucket_center)/d(extension) of the smooth chain
    bc = anchor + L1 e(t1) + L2 e(t2) + R(t3) c."""
    m1, m2, m3 = geometry.actuator_maps
    t1, t2, t3 = joint_angles(geometry, ext)
    L1, L2, _ = geometry.link_lengths
    c = geometry.bucket_centroid_local
    e1 = L1 * np.array([-math.sin(t1), math.cos(t1)])
    e2 = L2 * np.array([-math.sin(t2), math.cos(t2)])
    s3, c3 = math.sin(t3), math.cos(t3)
    rc = np.array([-s3 * c[0] - c3 * c[1], c3 * c[0] - s3 * c[1]])
    J = np.zeros((3, 2))
    J[0] = m1.slope * (e1 + e2 + rc)
    J[1] = m2.slope * (e2 + rc)
    J[2] = m3.slope * rc
    return J


def gravity_joint_load(geometry: ExcavatorGeometry, ext: np.ndarray,
                       payload_mass: float, g: float = 9.81) -> np.ndarray:
    """Quasi-static actuator forces (N) holding link weights plus a payload
    at the bucket center: f_i = sum_k m_k g dz_k/dq_i, link CoMs at segment
    midpoints."""
    m1, m2, m3 = geometry.actuator_maps
    t1, t2, t3 = joint_angles(geometry, ext)
    L1, L2, _ = geometry.link_lengths
    c = geometry.bucket_centroid_local
    b = np.array([m1.slope, m2.slope, m3.slope])
    # z-derivatives of each angle's building blocks
    dz1 = L1 * math.cos(t1)            # d(L1 sin t1)/dt1
    dz2 = L2 * math.cos(t2)
    s3, c3 = math.sin(t3), math.cos(t3)
    dz3 = c[0] * c3 - c[1] * s3        # d((R c)_z)/dt3
    # d z / d q for chain points: boom tip, arm tip, bucket center
    dz_boomtip = np.array([b[0] * dz1, 0.0, 0.0])
    dz_armtip = dz_boomtip + np.array([b[0] * dz2, b[1] * dz2, 0.0])
    dz_bc = dz_armtip + np.array([b[0] * dz3, b[1] * dz3, b[2] * dz3])
    m_boom, m_arm, m_bucket = geometry.link_masses
    f = m_boom * g * 0.5 * dz_boomtip
    f += m_arm * g * 0.5 * (dz_boomtip + dz_armtip)
    f += m_bucket * g * 0.5 * (dz_armtip + dz_bc)
    f += payload_mass * g * dz_bc
    return f
