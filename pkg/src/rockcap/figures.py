"""Matplotlib rendering of episode data and world snapshots to image files.

All evaluation figures are rendered from the same arrays that go into the
delimited exports, so the plots and the CSVs always agree.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

GOAL_COLOR = "tab:green"
ROCK_COLOR = "tab:brown"
BUCKET_COLOR = "tab:blue"


def render_scene(world_state, geometry, rock, goal=None, delta_prox=0.2,
                 path=None, ax=None, title=None):
    """Draw one world snapshot: terrain, linkage, bucket, rock, goal square."""
    from .excavator import forward_kinematics

    own_fig = ax is None
    if own_fig:
        fig, ax = plt.subplots(figsize=(9, 5))
    terr = world_state.terrain
    xs = terr.x_origin + np.arange(len(terr.heights)) * terr.cell_size
    ax.fill_between(xs, terr.heights, terr.heights.min() - 0.5,
                    color="tan", alpha=0.6, lw=0)
    fk = forward_kinematics(geometry, world_state.actuator_ext)
    chain = np.vstack([fk.joint_points, ])
    ax.plot(chain[:, 0], chain[:, 1], "o-", color="dimgray", lw=3, ms=4)
    poly = np.vstack([fk.bucket_polygon_world, fk.bucket_polygon_world[:1]])
    ax.plot(poly[:, 0], poly[:, 1], color=BUCKET_COLOR, lw=2)
    rv = rock.world_vertices(world_state.rock_pose)
    rv = np.vstack([rv, rv[:1]])
    ax.fill(rv[:, 0], rv[:, 1], color=ROCK_COLOR, alpha=0.8)
    ax.plot(*world_state.rock_pose[:2], "k+", ms=8)
    if goal is not None:
        gx, gz = goal
        ax.add_patch(plt.Rectangle((gx - delta_prox, gz - delta_prox),
                                   2 * delta_prox, 2 * delta_prox,
                                   fill=False, color=GOAL_COLOR, lw=2))
    ax.set_xlim(-14, 1)
    ax.set_ylim(-2, 8)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("z [m]")
    if title:
        ax.set_title(title)
    if own_fig and path is not None:
        fig.savefig(path, dpi=110, bbox_inches="tight")
        plt.close(fig)


def plot_trajectory(times, rock_xz, bucket_xz, goal, delta_prox, path, title=None):
    fig, ax = plt.subplots(figsize=(7, 5))
    rock_xz = np.asarray(rock_xz)
    bucket_xz = np.asarray(bucket_xz)
    ax.plot(rock_xz[:, 0], rock_xz[:, 1], color=ROCK_COLOR, label="rock CoM")
    ax.plot(bucket_xz[:, 0], bucket_xz[:, 1], color=BUCKET_COLOR, label="bucket center")
    ax.plot(*rock_xz[0], "o", color=ROCK_COLOR)
    ax.plot(*bucket_xz[0], "o", color=BUCKET_COLOR)
    ax.add_patch(plt.Rectangle((goal[0] - delta_prox, goal[1] - delta_prox),
                               2 * delta_prox, 2 * delta_prox,
                               fill=False, color=GOAL_COLOR, lw=2,
                               label="goal proximity"))
    ax.set_xlabel("x [m]")
    ax.set_ylabel("z [m]")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def plot_commands(times, speeds, path, title=None):
    fig, ax = plt.subplots(figsize=(7, 4))
    speeds = np.asarray(speeds)
    for i, name in enumerate(("boom", "arm", "bucket")):
        ax.plot(times, speeds[:, i], label=name)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("joint speed command [m/s]")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def plot_tilt(times, theta, phi, delta_tilt, path, title=None):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(times, theta, label="pitch")
    ax.plot(times, phi, label="roll")
    ax.axhline(delta_tilt, color=GOAL_COLOR, ls="--", lw=1)
    ax.axhline(-delta_tilt, color=GOAL_COLOR, ls="--", lw=1)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("angle [rad]")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def plot_training_curve(steps, values, smoothed, path, ylabel, title=None):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, values, alpha=0.3, color="tab:blue")
    ax.plot(steps, smoothed, color="tab:blue")
    ax.set_xlabel("environment steps")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
