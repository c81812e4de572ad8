"""Convex polygon helpers in the plane.

Everything here works on (k, 2) float arrays of vertices in counterclockwise
order.  Clipping is plain Sutherland-Hodgman against one closed halfplane at
a time, which is all the region polygons need: they start from the box and
only ever get cut by constraint lines.
"""

from __future__ import annotations

import numpy as np

from .errors import GeometryError


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counterclockwise rings."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def box_corners(lo, hi) -> np.ndarray:
    """Counterclockwise corners of the axis-aligned box [lo, hi] in 2-d."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return np.array(
        [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
    )


def clip_halfplane(vertices, normal, offset) -> np.ndarray:
    """Clip a convex ring to the closed side {x : normal.x + offset >= 0}.

    Returns the (possibly empty) clipped ring; orientation is preserved.
    """
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] == 0:
        return v.reshape(0, 2)
    normal = np.asarray(normal, dtype=float)
    values = v @ normal + offset
    out = []
    k = v.shape[0]
    for i in range(k):
        j = (i + 1) % k
        vi, vj = values[i], values[j]
        if vi >= 0.0:
            out.append(v[i])
        if (vi > 0.0 and vj < 0.0) or (vi < 0.0 and vj > 0.0):
            t = vi / (vi - vj)
            out.append(v[i] + t * (v[j] - v[i]))
    if not out:
        return np.zeros((0, 2))
    return np.array(out)


def dedupe_ring(vertices, tol: float) -> np.ndarray:
    """Drop consecutive vertices closer than ``tol`` (ring-wise)."""
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] < 2:
        return v
    kept = [v[0]]
    for p in v[1:]:
        if np.max(np.abs(p - kept[-1])) > tol:
            kept.append(p)
    while len(kept) > 1 and np.max(np.abs(kept[0] - kept[-1])) <= tol:
        kept.pop()
    return np.array(kept)


def clip_line_to_polygon(normal, offset, vertices):
    """Segment of the line {x : normal.x + offset = 0} inside a convex ring.

    ``vertices`` must be counterclockwise.  Returns an endpoint pair
    (2, 2)-array, or None when the line misses the polygon (touching a
    single point also counts as a miss).
    """
    normal = np.asarray(normal, dtype=float)
    v = np.asarray(vertices, dtype=float)
    nn = float(normal @ normal)
    if nn == 0.0:
        raise GeometryError("cannot draw a line for a zero normal")
    if v.shape[0] < 3:
        return None
    anchor = -offset / nn * normal
    direction = np.array([-normal[1], normal[0]])
    reach = float(np.max(np.linalg.norm(v - anchor, axis=1))) + 1.0
    t_lo, t_hi = -reach, reach
    k = v.shape[0]
    for i in range(k):
        a, b = v[i], v[(i + 1) % k]
        edge = b - a
        inward = np.array([-edge[1], edge[0]])  # interior is left of a CCW edge
        num = float(inward @ (anchor - a))
        den = float(inward @ direction)
        if abs(den) < 1e-15 * (1.0 + abs(num)):
            if num < 0.0:
                return None
            continue
        bound = -num / den
        if den > 0.0:
            t_lo = max(t_lo, bound)
        else:
            t_hi = min(t_hi, bound)
    if t_hi - t_lo <= 1e-12 * reach:
        return None
    return np.array([anchor + t_lo * direction, anchor + t_hi * direction])
