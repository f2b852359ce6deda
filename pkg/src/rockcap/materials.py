"""Soil material definitions loaded from the materials fixture file."""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import yaml


class MaterialError(ValueError):
    pass


@dataclass(frozen=True)
class SoilMaterial:
    name: str
    cohesion: float                 # Pa
    density: float                  # kg/m^3
    max_density: float              # kg/m^3
    youngs_modulus: float           # Pa
    internal_friction_angle: float  # rad
    dilatancy_angle: float          # rad
    swell_factor: float
    repose_compaction_rate: float

    def __post_init__(self):
        numeric = (
            self.cohesion, self.density, self.max_density, self.youngs_modulus,
            self.internal_friction_angle, self.dilatancy_angle,
            self.swell_factor, self.repose_compaction_rate,
        )
        if any(v < 0 for v in numeric):
            raise MaterialError(f"{self.name}: material fields must be >= 0")
        if not 0.0 < self.internal_friction_angle < math.pi / 2:
            raise MaterialError(f"{self.name}: friction angle outside (0, pi/2)")


def load_materials(path=None) -> dict[str, SoilMaterial]:
    if path is None:
        text = resources.files("rockcap.data").joinpath("materials.cfg").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = yaml.safe_load(text)
    out = {}
    for name, fields in raw.items():
        try:
            out[name] = SoilMaterial(name=name, **{k: float(v) for k, v in fields.items()})
        except TypeError as exc:
            raise MaterialError(f"{name}: bad material fields ({exc})") from exc
    return out
