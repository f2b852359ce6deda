"""Soil-tool reaction on the bucket: a separable earth-pressure style law.

Force on the submerged cutting edge:
  - passive resistance 0.5 * rho * g * d^2 * Kp * width opposing the cutting
    velocity, with Kp = (1+sin phi)/(1-sin phi) * (1 + tan psi),
  - a cohesive term Kc * c * d * width along the same direction,
  - a stiffness-limited normal term along the terrain surface normal, scaled
    by sqrt(E/E_ref) so cohesion and friction dominate magnitude ordering
    between materials.
Swept soil is removed from the height field: volume = |v_t| * dt * d * width.
"""
from __future__ import annotations

import math

import numpy as np

from .materials import SoilMaterial
from .terrain import TerrainField

G = 9.81
KC = 2.0
E_REF = 1.0e6
NORMAL_SCALE = 0.2


def passive_pressure_coefficient(material: SoilMaterial) -> float:
    s = math.sin(material.internal_friction_angle)
    return (1.0 + s) / (1.0 - s) * (1.0 + math.tan(material.dilatancy_angle))


def soil_reaction(
    bucket_polygon_world: np.ndarray,
    bucket_velocity: np.ndarray,
    terrain: TerrainField,
    material: SoilMaterial,
    width: float = 2.2,
    dt: float = 1.0 / 60.0,
) -> tuple[np.ndarray, float]:
    """Reaction force (N) on the bucket and the soil volume removed (m^3).

    The removed volume is deducted from the height field along the cells the
    cutting edge swept this step.
    """
    verts = bucket_polygon_world
    depths = np.array([terrain.height_at(x) - z for x, z in verts])
    submerged = depths > 0.0
    if not np.any(submerged):
        return np.zeros(2), 0.0
    deepest = int(np.argmax(depths))
    d = float(depths[deepest])
    x_edge = float(verts[deepest, 0])

    vx, vz = float(bucket_velocity[0]), float(bucket_velocity[1])
    speed = math.hypot(vx, vz)
    kp = passive_pressure_coefficient(material)
    f_cut_mag = (0.5 * material.density * G * d * d * kp
                 + KC * material.cohesion * d) * width
    force = np.zeros(2)
    if speed > 1e-9:
        force -= f_cut_mag * np.array([vx, vz]) / speed
    normal = terrain.normal_at(x_edge)
    f_norm = NORMAL_SCALE * math.sqrt(material.youngs_modulus / E_REF) \
        * 0.5 * material.density * G * d * d * width
    force += f_norm * normal

    removed = abs(vx) * dt * d * width
    if removed > 0.0:
        x_lo = min(x_edge, x_edge + vx * dt)
        x_hi = max(x_edge, x_edge + vx * dt)
        # widen to at least one cell so the deduction lands somewhere
        if x_hi - x_lo < terrain.cell_size:
            pad = 0.5 * (terrain.cell_size - (x_hi - x_lo))
            x_lo, x_hi = x_lo - pad, x_hi + pad
        removed = terrain.remove_volume(x_lo, x_hi, removed, width)
    return force, removed
