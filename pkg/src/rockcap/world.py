"""The planar rigid-body world: actuated bucket, polygonal rock, deformable
ground, quasi-static cabin tilt. Fixed-rate stepping at 60 Hz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geom2d, soil
from .excavator import (
    ExcavatorGeometry,
    bucket_center_jacobian,
    bucket_motion,
    forward_kinematics,
    gravity_joint_load,
    point_velocity,
)
from .materials import SoilMaterial
from .rock import RockShape
from .terrain import TerrainField

G = 9.81
DT = 1.0 / 60.0
CONTACT_SLOP = 0.01
ACTUATOR_TAU = 0.05
FRICTION_ROCK_BUCKET = 0.5
FRICTION_ROCK_TERRAIN = 0.6
LATERAL_KICK_GAIN = 0.02      # s; kick std = gain * |tangential impulse| / mass
ROLL_DECAY_TAU = 0.25
ROCK_SOIL_DRAG = 60.0         # N s / m per m^2 of submerged cross-section
SOLVER_ITERATIONS = 16
SLEEP_SPEED = 1e-3            # m/s; supported bodies below this stop exactly
SPAWN_CLEARANCE = 0.5


class PhysicsContractError(RuntimeError):
    """Non-finite state or other caller contract violation."""


@dataclass
class WorldState:
    actuator_ext: np.ndarray      # (3,) m
    actuator_vel: np.ndarray      # (3,) m/s
    rock_pose: np.ndarray         # (x, z, angle)
    rock_vel: np.ndarray          # (vx, vz, omega)
    rock_lateral_y: float
    terrain: TerrainField
    bucket_soil_mass: float
    cabin_pitch: float
    cabin_roll: float
    joint_forces: np.ndarray      # (3,) kN
    sim_time: float
    # step diagnostics (not part of the physical state contract)
    max_penetration: float = 0.0
    bucket_support_impulse: float = 0.0

    def copy(self) -> "WorldState":
        return WorldState(
            actuator_ext=self.actuator_ext.copy(),
            actuator_vel=self.actuator_vel.copy(),
            rock_pose=self.rock_pose.copy(),
            rock_vel=self.rock_vel.copy(),
            rock_lateral_y=self.rock_lateral_y,
            terrain=self.terrain.copy(),
            bucket_soil_mass=self.bucket_soil_mass,
            cabin_pitch=self.cabin_pitch,
            cabin_roll=self.cabin_roll,
            joint_forces=self.joint_forces.copy(),
            sim_time=self.sim_time,
            max_penetration=self.max_penetration,
            bucket_support_impulse=self.bucket_support_impulse,
        )

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.actuator_ext))
            and np.all(np.isfinite(self.actuator_vel))
            and np.all(np.isfinite(self.rock_pose))
            and np.all(np.isfinite(self.rock_vel))
            and math.isfinite(self.rock_lateral_y)
            and math.isfinite(self.cabin_pitch)
            and math.isfinite(self.cabin_roll)
            and np.all(np.isfinite(self.joint_forces))
            and np.all(np.isfinite(self.terrain.heights))
        )


def rock_on_terrain_spawn(rock: RockShape, x: float, terrain: TerrainField) -> np.ndarray:
    """Resting-free spawn pose: the rock hangs with 0.5 m of clearance."""
    if not terrain.in_span(x):
        raise ValueError(f"spawn x={x} outside terrain span "
                         f"[{terrain.x_origin}, {terrain.x_max}]")
    z = terrain.height_at(x) + SPAWN_CLEARANCE + rock.clearance_radius
    return np.array([x, z, 0.0])


@dataclass
class _Body:
    inv_m: float
    inv_i: float
    com: np.ndarray
    vel: np.ndarray
    omega: float

    def point_velocity(self, p: np.ndarray) -> np.ndarray:
        r = p - self.com
        return self.vel + self.omega * np.array([-r[1], r[0]])


@dataclass
class _SolverContact:
    body_b: _Body | None      # None = static terrain
    point: np.ndarray
    normal: np.ndarray
    gap: float
    friction: float
    accum_n: float = 0.0
    accum_t: float = 0.0
    kind: str = "terrain"


def resolve_contacts(body_a: _Body, contacts: list[_SolverContact], dt: float,
                     iterations: int = SOLVER_ITERATIONS) -> None:
    """Sequential impulses with speculative targets: relative normal velocity
    may at most close the remaining gap within one step; no restitution.
    Equal and opposite impulses keep momentum exchange exact for two dynamic
    bodies. Scalar math on purpose: this is the per-step hot loop."""
    if any(c.body_b is not None and c.body_b.inv_m > 0.0 for c in contacts):
        _resolve_contacts_two_body(body_a, contacts, dt, iterations)
        return
    inv_ma, inv_ia = body_a.inv_m, body_a.inv_i
    ax, ay = float(body_a.com[0]), float(body_a.com[1])
    vax, vay, wa = float(body_a.vel[0]), float(body_a.vel[1]), float(body_a.omega)

    pre = []
    for c in contacts:
        nx, ny = float(c.normal[0]), float(c.normal[1])
        px, py = float(c.point[0]), float(c.point[1])
        rax, ray = px - ax, py - ay
        ra_x_n = rax * ny - ray * nx
        ra_x_t = rax * nx + ray * ny          # ra cross tangent(-ny, nx)
        k_n = inv_ma + inv_ia * ra_x_n * ra_x_n
        k_t = inv_ma + inv_ia * ra_x_t * ra_x_t
        b = c.body_b
        if b is not None:
            rbx, rby = px - float(b.com[0]), py - float(b.com[1])
            rb_x_n = rbx * ny - rby * nx
            rb_x_t = rbx * nx + rby * ny
            k_n += b.inv_m + b.inv_i * rb_x_n * rb_x_n
            k_t += b.inv_m + b.inv_i * rb_x_t * rb_x_t
            vbx = float(b.vel[0]) - float(b.omega) * rby
            vby = float(b.vel[1]) + float(b.omega) * rbx
        else:
            vbx = vby = 0.0
        target = -max(c.gap, 0.0) / dt
        pre.append((nx, ny, rax, ray, k_n, k_t, vbx, vby, target, c))
        c.accum_n = 0.0
        c.accum_t = 0.0

    for _ in range(iterations):
        for nx, ny, rax, ray, k_n, k_t, vbx, vby, target, c in pre:
            relx = vax - wa * ray - vbx
            rely = vay + wa * rax - vby
            vn = relx * nx + rely * ny
            dlam = -(vn - target) / k_n
            new_n = c.accum_n + dlam
            if new_n < 0.0:
                new_n = 0.0
            dlam = new_n - c.accum_n
            c.accum_n = new_n
            if dlam != 0.0:
                ix, iy = dlam * nx, dlam * ny
                vax += ix * inv_ma
                vay += iy * inv_ma
                wa += inv_ia * (rax * iy - ray * ix)
            # Coulomb friction against the accumulated normal impulse
            tx, ty = -ny, nx
            relx = vax - wa * ray - vbx
            rely = vay + wa * rax - vby
            vt = relx * tx + rely * ty
            dlam_t = -vt / k_t
            max_t = c.friction * c.accum_n
            new_t = c.accum_t + dlam_t
            if new_t > max_t:
                new_t = max_t
            elif new_t < -max_t:
                new_t = -max_t
            dlam_t = new_t - c.accum_t
            c.accum_t = new_t
            if dlam_t != 0.0:
                ix, iy = dlam_t * tx, dlam_t * ty
                vax += ix * inv_ma
                vay += iy * inv_ma
                wa += inv_ia * (rax * iy - ray * ix)

    body_a.vel[0] = vax
    body_a.vel[1] = vay
    body_a.omega = wa


def _resolve_contacts_two_body(body_a: _Body, contacts: list[_SolverContact],
                               dt: float, iterations: int) -> None:
    """General path with impulse exchange into dynamic second bodies."""
    for c in contacts:
        c.accum_n = 0.0
        c.accum_t = 0.0
    for _ in range(iterations):
        for c in contacts:
            n = c.normal
            t = np.array([-n[1], n[0]])
            ra = c.point - body_a.com
            ra_x_n = ra[0] * n[1] - ra[1] * n[0]
            k_n = body_a.inv_m + body_a.inv_i * ra_x_n * ra_x_n
            b = c.body_b
            if b is not None:
                rb = c.point - b.com
                rb_x_n = rb[0] * n[1] - rb[1] * n[0]
                k_n += b.inv_m + b.inv_i * rb_x_n * rb_x_n
            for axis, is_normal in ((n, True), (t, False)):
                v_other = b.point_velocity(c.point) if b is not None else np.zeros(2)
                v_rel = body_a.point_velocity(c.point) - v_other
                v_axis = float(v_rel @ axis)
                r_x_axis = ra[0] * axis[1] - ra[1] * axis[0]
                k = body_a.inv_m + body_a.inv_i * r_x_axis * r_x_axis
                if b is not None:
                    rb_x_axis = rb[0] * axis[1] - rb[1] * axis[0]
                    k += b.inv_m + b.inv_i * rb_x_axis * rb_x_axis
                if is_normal:
                    target = -max(c.gap, 0.0) / dt
                    dlam = -(v_axis - target) / k
                    new = max(c.accum_n + dlam, 0.0)
                    dlam = new - c.accum_n
                    c.accum_n = new
                else:
                    dlam = -v_axis / k
                    cap = c.friction * c.accum_n
                    new = min(max(c.accum_t + dlam, -cap), cap)
                    dlam = new - c.accum_t
                    c.accum_t = new
                if dlam != 0.0:
                    imp = dlam * axis
                    body_a.vel = body_a.vel + imp * body_a.inv_m
                    body_a.omega += body_a.inv_i * (ra[0] * imp[1] - ra[1] * imp[0])
                    if b is not None:
                        b.vel = b.vel - imp * b.inv_m
                        b.omega -= b.inv_i * (rb[0] * imp[1] - rb[1] * imp[0])


def _terrain_contacts(verts: np.ndarray, terrain: TerrainField, margin: float,
                      friction: float) -> list[_SolverContact]:
    out = []
    for v in verts:
        h = terrain.height_at(v[0])
        n = terrain.normal_at(v[0])
        gap = (v[1] - h) * n[1]
        if gap <= margin:
            out.append(_SolverContact(body_b=None, point=v.copy(), normal=n,
                                      gap=float(gap), friction=friction,
                                      kind="terrain"))
    return out


def _bucket_contacts(rock_verts: np.ndarray, plates_world: list[np.ndarray],
                     bucket_body: _Body, margin: float) -> list[_SolverContact]:
    out = []
    for plate in plates_world:
        for c in geom2d.convex_contacts(rock_verts, plate, margin):
            out.append(_SolverContact(body_b=bucket_body, point=c.point,
                                      normal=c.normal, gap=c.gap,
                                      friction=FRICTION_ROCK_BUCKET,
                                      kind="bucket"))
    return out


def _rock_penetrations(rock_verts: np.ndarray, terrain: TerrainField,
                       plates_world: list[np.ndarray]) -> tuple[float, float]:
    pen_t = 0.0
    for v in rock_verts:
        pen_t = max(pen_t, terrain.height_at(v[0]) - v[1])
    pen_b = 0.0
    for plate in plates_world:
        for c in geom2d.convex_contacts(rock_verts, plate, 0.0):
            pen_b = max(pen_b, -c.gap)
    return pen_t, pen_b


def step(
    state: WorldState,
    commanded_speeds: np.ndarray,
    material: SoilMaterial,
    geometry: ExcavatorGeometry,
    rock: RockShape,
    dt: float = DT,
    rng: np.random.Generator | None = None,
    friction_rock_terrain: float = FRICTION_ROCK_TERRAIN,
) -> WorldState:
    """Advance one fixed step. Returns a new WorldState; the input state is
    not modified. rng feeds the lateral kick; pass None for a kick-free step.
    """
    if not state.is_finite():
        raise PhysicsContractError("non-finite world state")
    if not np.all(np.isfinite(commanded_speeds)):
        raise PhysicsContractError("non-finite commanded speeds")
    s = state.copy()

    # actuators: first-order lag toward the command, clamped at limits
    cmd = np.asarray(commanded_speeds, dtype=float)
    v_act = s.actuator_vel + (dt / ACTUATOR_TAU) * (cmd - s.actuator_vel)
    q_new = geometry.clamp_extensions(s.actuator_ext + v_act * dt)
    v_real = (q_new - s.actuator_ext) / dt
    s.actuator_ext = q_new
    s.actuator_vel = v_real

    fk = forward_kinematics(geometry, q_new)
    ref_vel, ref_point, omega_b = bucket_motion(geometry, q_new, v_real)
    bucket_body = _Body(inv_m=0.0, inv_i=0.0, com=ref_point,
                        vel=ref_vel, omega=omega_b)

    # soil reaction on the cutting edge (mutates terrain heights)
    depths = [s.terrain.height_at(v[0]) - v[1] for v in fk.bucket_polygon_world]
    deepest = int(np.argmax(depths))
    edge_vel = point_velocity(ref_point, ref_vel, omega_b,
                              fk.bucket_polygon_world[deepest])
    f_soil, removed = soil.soil_reaction(
        fk.bucket_polygon_world, edge_vel, s.terrain, material,
        width=geometry.bucket_width, dt=dt)
    capacity = abs(geom2d.polygon_area(geometry.bucket_polygon)) * geometry.bucket_width
    captured = min(removed, max(0.0, capacity - s.bucket_soil_mass / material.density))
    s.bucket_soil_mass += captured * material.density

    # rock dynamics
    mass, inertia = rock.mass, rock.inertia
    rock_body = _Body(inv_m=1.0 / mass, inv_i=1.0 / inertia,
                      com=s.rock_pose[:2].copy(),
                      vel=s.rock_vel[:2].copy(), omega=float(s.rock_vel[2]))
    rock_body.vel[1] -= G * dt

    # viscous drag while submerged in soil
    verts = rock.world_vertices(s.rock_pose)
    sub_depth = max(0.0, float(np.mean(
        [s.terrain.height_at(v[0]) - v[1] for v in verts])))
    if sub_depth > 0.0:
        k = ROCK_SOIL_DRAG * sub_depth * rock.effective_depth
        factor = 1.0 / (1.0 + k * dt / mass)
        rock_body.vel *= factor
        rock_body.omega /= (1.0 + k * dt / inertia)

    margin = 0.05 + (float(np.linalg.norm(rock_body.vel))
                     + float(np.linalg.norm(ref_vel)) + abs(omega_b)) * dt
    contacts = _terrain_contacts(verts, s.terrain, margin, friction_rock_terrain)
    contacts += _bucket_contacts(verts, fk.bucket_plates_world, bucket_body, margin)
    resolve_contacts(rock_body, contacts, dt)

    # supported and almost still: stop exactly (removes kinetic energy only)
    if contacts:
        total_n = sum(c.accum_n for c in contacts)
        speed = max(abs(rock_body.vel[0]), abs(rock_body.vel[1]),
                    abs(rock_body.omega))
        if speed < SLEEP_SPEED and total_n >= 0.5 * mass * G * dt:
            rock_body.vel[:] = 0.0
            rock_body.omega = 0.0

    s.rock_pose[:2] += rock_body.vel * dt
    s.rock_pose[2] += rock_body.omega * dt
    s.rock_vel[:2] = rock_body.vel
    s.rock_vel[2] = rock_body.omega

    # positional fixup for residual penetration beyond the slop
    verts = rock.world_vertices(s.rock_pose)
    for _ in range(3):
        pen_t, pen_b = _rock_penetrations(verts, s.terrain, fk.bucket_plates_world)
        if pen_b > CONTACT_SLOP:
            worst = None
            for plate in fk.bucket_plates_world:
                for c in geom2d.convex_contacts(verts, plate, 0.0):
                    if worst is None or c.gap < worst.gap:
                        worst = c
            if worst is not None:
                s.rock_pose[:2] += worst.normal * (-worst.gap - 0.5 * CONTACT_SLOP)
                verts = rock.world_vertices(s.rock_pose)
                pen_t, _ = _rock_penetrations(verts, s.terrain, fk.bucket_plates_world)
        if pen_t > CONTACT_SLOP:
            pressed = any(c.kind == "bucket" and c.normal[1] < -0.3 and c.accum_n > 0
                          for c in contacts)
            if pressed:
                # crushed downward: the soil yields under the rock
                lo, hi = float(verts[:, 0].min()), float(verts[:, 0].max())
                z_floor = float(verts[:, 1].min()) + 0.5 * CONTACT_SLOP
                s.terrain.press_down(lo, hi, z_floor, rock.effective_depth)
            else:
                s.rock_pose[1] += pen_t - 0.5 * CONTACT_SLOP
                verts = rock.world_vertices(s.rock_pose)
        pen_t, pen_b = _rock_penetrations(verts, s.terrain, fk.bucket_plates_world)
        if pen_t <= CONTACT_SLOP and pen_b <= CONTACT_SLOP:
            break
    s.max_penetration = max(pen_t, pen_b)

    # lateral kick from tangential bucket-contact impulses
    tangential = sum(abs(c.accum_t) for c in contacts if c.kind == "bucket")
    support = sum(c.accum_n for c in contacts if c.kind == "bucket")
    s.bucket_support_impulse = support
    sigma = LATERAL_KICK_GAIN * tangential / mass
    if rng is not None:
        s.rock_lateral_y += sigma * float(rng.standard_normal())

    # reaction of the rock on the bucket (for tilt and joint forces)
    f_rock_on_bucket = np.zeros(2)
    for c in contacts:
        if c.kind != "bucket":
            continue
        t = np.array([-c.normal[1], c.normal[0]])
        f_rock_on_bucket -= (c.accum_n * c.normal + c.accum_t * t) / dt

    # quasi-static cabin pitch about the forward track edge; the static
    # manipulator weight is balanced by the counterweight and excluded
    edge = np.array([-geometry.track_half_length, 0.0])
    tool_force = f_soil + f_rock_on_bucket
    payload_w = np.array([0.0, -s.bucket_soil_mass * G])
    # positive pitch = tipping toward the work (CCW in the x-z plane)
    moment = 0.0
    for point, force in ((fk.bucket_center, tool_force),
                         (fk.bucket_center, payload_w)):
        r = point - edge
        moment += r[0] * force[1] - r[1] * force[0]
    m_rest = geometry.machine_mass * G * geometry.track_half_length
    s.cabin_pitch = math.atan(moment / m_rest)

    if support > 1e-6:
        s.cabin_roll = math.atan(
            mass * s.rock_lateral_y
            / (geometry.machine_mass * geometry.track_half_width))
    else:
        s.cabin_roll *= math.exp(-dt / ROLL_DECAY_TAU)

    # actuator forces: gravity load plus Jacobian-transpose of tool forces
    jac = bucket_center_jacobian(geometry, q_new)
    f_joint = gravity_joint_load(geometry, q_new, payload_mass=s.bucket_soil_mass)
    f_joint += jac @ tool_force
    s.joint_forces = f_joint / 1000.0

    s.sim_time += dt
    if not s.is_finite():
        raise PhysicsContractError("step produced a non-finite state")
    return s
