"""Deformable ground as a 1D-along-x height field."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TerrainError(ValueError):
    pass


@dataclass
class TerrainField:
    cell_size: float
    heights: np.ndarray
    x_origin: float

    def __post_init__(self):
        self.heights = np.asarray(self.heights, dtype=float)
        if not np.all(np.isfinite(self.heights)):
            raise TerrainError("terrain heights must be finite")

    @property
    def x_max(self) -> float:
        return self.x_origin + (len(self.heights) - 1) * self.cell_size

    def copy(self) -> "TerrainField":
        return TerrainField(self.cell_size, self.heights.copy(), self.x_origin)

    def in_span(self, x: float) -> bool:
        return self.x_origin <= x <= self.x_max

    def height_at(self, x: float) -> float:
        """Linearly interpolated ground elevation; clamped at the ends."""
        u = (x - self.x_origin) / self.cell_size
        i = int(np.floor(u))
        if i < 0:
            return float(self.heights[0])
        if i >= len(self.heights) - 1:
            return float(self.heights[-1])
        frac = u - i
        return float(self.heights[i] * (1 - frac) + self.heights[i + 1] * frac)

    def slope_at(self, x: float) -> float:
        u = (x - self.x_origin) / self.cell_size
        i = int(np.floor(u))
        if i < 0 or i >= len(self.heights) - 1:
            return 0.0
        return float((self.heights[i + 1] - self.heights[i]) / self.cell_size)

    def normal_at(self, x: float) -> np.ndarray:
        s = self.slope_at(x)
        n = np.array([-s, 1.0])
        return n / np.linalg.norm(n)

    def remove_volume(self, x_lo: float, x_hi: float, volume: float, width: float) -> float:
        """Lower the cells covering [x_lo, x_hi] by a uniform amount matching
        the removed volume (out-of-plane width given). Returns the volume
        actually removed."""
        if volume <= 0.0 or x_hi <= x_lo:
            return 0.0
        i0 = max(0, int(np.floor((x_lo - self.x_origin) / self.cell_size)))
        i1 = min(len(self.heights) - 1, int(np.ceil((x_hi - self.x_origin) / self.cell_size)))
        if i1 <= i0:
            return 0.0
        span = (i1 - i0) * self.cell_size
        dz = volume / (span * width)
        self.heights[i0:i1 + 1] -= dz
        return volume

    def press_down(self, x_lo: float, x_hi: float, z_target: float, width: float) -> float:
        """Force the cells under [x_lo, x_hi] down to at most z_target
        (soil yielding under a crushing load); returns the displaced volume."""
        i0 = max(0, int(np.floor((x_lo - self.x_origin) / self.cell_size)))
        i1 = min(len(self.heights) - 1, int(np.ceil((x_hi - self.x_origin) / self.cell_size)))
        displaced = 0.0
        for i in range(i0, i1 + 1):
            if self.heights[i] > z_target:
                displaced += (self.heights[i] - z_target) * self.cell_size * width
                self.heights[i] = z_target
        return displaced


def flat_terrain(x_lo: float = -14.0, x_hi: float = 1.0, cell_size: float = 0.1,
                 height: float = 0.0) -> TerrainField:
    n = int(round((x_hi - x_lo) / cell_size)) + 1
    return TerrainField(cell_size=cell_size, heights=np.full(n, height), x_origin=x_lo)
