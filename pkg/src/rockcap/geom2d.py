"""Planar polygon utilities shared by the physics world.

Polygons are (N, 2) float64 arrays of vertices in counter-clockwise order.
Contact generation works on convex polygons only; the bucket outline is
decomposed into convex plates before it reaches the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def polygon_area(verts: np.ndarray) -> float:
    """Signed area (positive for CCW winding)."""
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(np.sum(x * yn - xn * y) / 2.0)


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = np.sum(cross) / 2.0
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return np.array([cx, cy])


def polygon_inertia_per_mass(verts: np.ndarray) -> float:
    """Second moment of area about the centroid divided by area.

    Multiply by mass to get the moment of inertia of a uniform lamina.
    """
    c = polygon_centroid(verts)
    v = verts - c
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    num = np.sum(cross * (x * x + x * xn + xn * xn + y * y + y * yn + yn * yn))
    area = np.sum(cross) / 2.0
    return float(num / (12.0 * 2.0 * area))


def is_convex(verts: np.ndarray, tol: float = 1e-12) -> bool:
    n = len(verts)
    if n < 3:
        return False
    sign = 0.0
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        c = verts[(i + 2) % n]
        cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cr) < tol:
            continue
        if sign == 0.0:
            sign = cr
        elif sign * cr < 0:
            return False
    return sign != 0.0


def is_simple(verts: np.ndarray) -> bool:
    """True when no two non-adjacent edges intersect."""
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def transform(verts: np.ndarray, position: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return verts @ rot.T + position


def convex_decompose(verts: np.ndarray) -> list[np.ndarray]:
    """Split a simple polygon into convex pieces via ear-clipping triangles,
    then greedily merge coplanar-membership neighbours back into convex fans.
    """
    tris = _ear_clip(verts)
    pieces = [np.array(t) for t in tris]
    merged = True
    while merged:
        merged = False
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                cand = _try_merge(pieces[i], pieces[j])
                if cand is not None:
                    pieces[i] = cand
                    del pieces[j]
                    merged = True
                    break
            if merged:
                break
    return pieces


def _ear_clip(verts: np.ndarray) -> list[list[np.ndarray]]:
    idx = list(range(len(verts)))
    if polygon_area(verts) < 0:
        idx.reverse()
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 1e-14:
                continue
            ear = True
            for m in idx:
                if m in (i0, i1, i2):
                    continue
                if _point_in_triangle(verts[m], a, b, c):
                    ear = False
                    break
            if ear:
                tris.append([a.copy(), b.copy(), c.copy()])
                idx.pop(k)
                break
        else:
            raise ValueError("polygon is not simple; ear clipping failed")
    tris.append([verts[idx[0]].copy(), verts[idx[1]].copy(), verts[idx[2]].copy()])
    return tris


def _point_in_triangle(p, a, b, c) -> bool:
    def side(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    d1, d2, d3 = side(a, b, p), side(b, c, p), side(c, a, p)
    neg = (d1 < -1e-12) or (d2 < -1e-12) or (d3 < -1e-12)
    pos = (d1 > 1e-12) or (d2 > 1e-12) or (d3 > 1e-12)
    return not (neg and pos)


def _try_merge(pa: np.ndarray, pb: np.ndarray):
    """Merge two convex polygons sharing one full edge; returns None unless
    the union is convex."""
    na, nb = len(pa), len(pb)
    for i in range(na):
        a0, a1 = pa[i], pa[(i + 1) % na]
        for j in range(nb):
            b0, b1 = pb[j], pb[(j + 1) % nb]
            if np.allclose(a0, b1) and np.allclose(a1, b0):
                merged = [pa[(i + 1 + k) % na] for k in range(na)]
                merged += [pb[(j + 1 + k) % nb] for k in range(1, nb - 1)]
                m = np.array(merged)
                if is_convex(m):
                    return m
    return None


@dataclass
class Contact:
    """A single contact point between the rock and another surface.

    normal points away from the surface (the direction the rock must move to
    separate); gap is the signed distance along the normal (negative when
    penetrating).
    """

    point: np.ndarray
    normal: np.ndarray
    gap: float


def _project(verts: np.ndarray, axis: np.ndarray) -> tuple[float, float]:
    d = verts @ axis
    return float(d.min()), float(d.max())


def _face_normals(verts: np.ndarray) -> np.ndarray:
    edges = np.roll(verts, -1, axis=0) - verts
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
    lens = np.linalg.norm(normals, axis=1)
    return normals / lens[:, None]


def convex_contacts(rock: np.ndarray, other: np.ndarray, margin: float) -> list[Contact]:
    """SAT contact generation between two convex polygons.

    Returns contacts with gap <= margin; the normal pushes `rock` away from
    `other`. Separated pairs within the margin yield speculative contacts at
    the supporting vertices. The reported gap for separated pairs is the best
    face-axis separation, a lower bound of the true distance, which only makes
    speculative velocity caps more conservative. Scalar math on purpose: this
    sits in the per-step hot path.
    """
    r = [(float(p[0]), float(p[1])) for p in rock]
    o = [(float(p[0]), float(p[1])) for p in other]
    # AABB reject
    if (min(p[0] for p in r) > max(p[0] for p in o) + margin
            or max(p[0] for p in r) < min(p[0] for p in o) - margin
            or min(p[1] for p in r) > max(p[1] for p in o) + margin
            or max(p[1] for p in r) < min(p[1] for p in o) - margin):
        return []

    best_sep = -math.inf
    best_n = (0.0, 0.0)
    best_ref_is_other = True

    def axes(poly):
        n = len(poly)
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            ex, ey = x1 - x0, y1 - y0
            ln = math.hypot(ex, ey)
            if ln > 1e-12:
                yield ey / ln, -ex / ln

    for nx, ny in axes(o):
        lo_r = min(px * nx + py * ny for px, py in r)
        hi_o = max(px * nx + py * ny for px, py in o)
        sep = lo_r - hi_o
        if sep > margin:
            return []
        if sep > best_sep:
            best_sep, best_n, best_ref_is_other = sep, (nx, ny), True
    for nx, ny in axes(r):
        lo_o = min(px * nx + py * ny for px, py in o)
        hi_r = max(px * nx + py * ny for px, py in r)
        sep = lo_o - hi_r
        if sep > margin:
            return []
        if sep > best_sep:
            best_sep, best_n, best_ref_is_other = sep, (nx, ny), False

    nx, ny = best_n
    if best_ref_is_other:
        push = (nx, ny)
        hi = max(px * nx + py * ny for px, py in o)
        d = [px * nx + py * ny for px, py in r]
        src = r
    else:
        push = (-nx, -ny)
        hi = max(px * nx + py * ny for px, py in r)
        d = [px * nx + py * ny for px, py in o]
        src = o
    support = min(d)
    pts = [(p, di - hi) for p, di in zip(src, d) if di <= support + 5e-3]
    if len(pts) > 2:
        tx, ty = -push[1], push[0]
        pts.sort(key=lambda pg: pg[0][0] * tx + pg[0][1] * ty)
        pts = [pts[0], pts[-1]]
    n_arr = np.array(push)
    return [Contact(point=np.array(p), normal=n_arr.copy(), gap=float(g))
            for p, g in pts]
