"""Planar excavator rock-capturing workbench.

A self-contained 2D (x-z) substitute for a full terrain simulator: deformable
height-field ground, a three-joint manipulator with a bucket, a polygonal rock,
a goal-conditioned episode loop with a guiding reward, PPO training on a
from-scratch MLP, scenario evaluation, and a realtime teleoperation service.
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
