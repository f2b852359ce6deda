"""Rock bodies: fixed convex polygon families with density-derived mass.

Families I and II are the training shapes; III and IV are reserved for the
unseen-rock evaluation scenario. Vertex lists are frozen fixtures; shapes are
re-centered so the polygon centroid (the CoM for a uniform lamina) sits at
the local origin.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import geom2d


class RockError(ValueError):
    pass


EFFECTIVE_DEPTH = 0.8  # m, out-of-plane thickness used for mass

_FAMILY_VERTICES = {
    # irregular hexagon, characteristic radius ~0.5 m
    "I": [
        (0.52, 0.10), (0.26, 0.46), (-0.24, 0.42),
        (-0.50, 0.02), (-0.28, -0.40), (0.24, -0.44),
    ],
    # flattened pentagon, ~0.6 m
    "II": [
        (0.62, -0.10), (0.34, 0.38), (-0.36, 0.40),
        (-0.60, -0.06), (-0.08, -0.46),
    ],
    # elongated heptagon, ~0.45 m
    "III": [
        (0.46, 0.06), (0.30, 0.26), (-0.06, 0.32), (-0.38, 0.22),
        (-0.46, -0.08), (-0.20, -0.30), (0.26, -0.28),
    ],
    # chunky quadrilateral, ~0.65 m
    "IV": [
        (0.64, 0.18), (-0.30, 0.58), (-0.62, -0.22), (0.30, -0.54),
    ],
}

TRAINING_FAMILIES = ("I", "II")
UNSEEN_FAMILIES = ("III", "IV")


@dataclass(frozen=True)
class RockShape:
    vertices: np.ndarray   # CCW, centroid at origin
    density: float         # kg/m^3
    effective_depth: float
    family: str

    def __post_init__(self):
        if not geom2d.is_convex(self.vertices):
            raise RockError(f"rock family {self.family}: polygon must be convex")
        if self.mass <= 0.0:
            raise RockError(f"rock family {self.family}: non-positive mass")
        if self.inertia <= 0.0:
            raise RockError(f"rock family {self.family}: non-positive inertia")

    @cached_property
    def area(self) -> float:
        return geom2d.polygon_area(self.vertices)

    @cached_property
    def mass(self) -> float:
        return self.density * self.area * self.effective_depth

    @cached_property
    def inertia(self) -> float:
        return self.mass * geom2d.polygon_inertia_per_mass(self.vertices)

    @cached_property
    def clearance_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def world_vertices(self, pose: np.ndarray) -> np.ndarray:
        return geom2d.transform(self.vertices, pose[:2], pose[2])


def make_rock(family: str, density: float,
              effective_depth: float = EFFECTIVE_DEPTH) -> RockShape:
    if family not in _FAMILY_VERTICES:
        raise RockError(f"unknown rock family {family!r}")
    verts = np.array(_FAMILY_VERTICES[family], dtype=float)
    verts = verts - geom2d.polygon_centroid(verts)
    return RockShape(vertices=verts, density=float(density),
                     effective_depth=float(effective_depth), family=family)
