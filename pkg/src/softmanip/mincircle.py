"""Smallest enclosing circle of a 2D point set.

Randomized incremental construction, expected linear time. The shuffle
uses a private fixed-seed generator so results are reproducible and the
global random state is never touched.
"""

import random

from .errors import NoDetection

# Containment slack: covers accumulated rounding without admitting any
# point that is meaningfully outside.
_REL_EPS = 1 + 1e-14

_SHUFFLE_SEED = 0x5EC


def smallest_enclosing_circle(points):
    """Return ((cx, cy), radius) covering every input point.

    points is an iterable of (x, y) pairs; raises NoDetection when empty.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise NoDetection("cannot enclose an empty point set")
    random.Random(_SHUFFLE_SEED).shuffle(pts)

    circle = None
    for i, p in enumerate(pts):
        if circle is None or not _contains(circle, p):
            circle = _with_point_on_boundary(pts[: i + 1], p)
    return circle


def _with_point_on_boundary(pts, p):
    circle = (p, 0.0)
    for i, q in enumerate(pts):
        if not _contains(circle, q):
            if circle[1] == 0.0:
                circle = _diameter_circle(p, q)
            else:
                circle = _with_two_on_boundary(pts[: i + 1], p, q)
    return circle


def _with_two_on_boundary(pts, p, q):
    base = _diameter_circle(p, q)
    left = None
    right = None
    px, py = p
    qx, qy = q
    for r in pts:
        if _contains(base, r):
            continue
        side = _cross(px, py, qx, qy, r[0], r[1])
        circ = _circumcircle(p, q, r)
        if circ is None:
            continue
        cx, cy = circ[0]
        cside = _cross(px, py, qx, qy, cx, cy)
        if side > 0.0 and (left is None
                           or cside > _cross(px, py, qx, qy, left[0][0], left[0][1])):
            left = circ
        elif side < 0.0 and (right is None
                             or cside < _cross(px, py, qx, qy, right[0][0], right[0][1])):
            right = circ
    if left is None and right is None:
        return base
    if left is None:
        return right
    if right is None:
        return left
    return left if left[1] <= right[1] else right


def _diameter_circle(p, q):
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    r = max(_dist(cx, cy, *p), _dist(cx, cy, *q))
    return ((cx, cy), r)


def _circumcircle(a, b, c):
    # Work relative to a for numerical stability; collinear -> None.
    bx = b[0] - a[0]
    by = b[1] - a[1]
    cx = c[0] - a[0]
    cy = c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        return None
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = (a[0] + ux, a[1] + uy)
    r = max(_dist(*center, *a), _dist(*center, *b), _dist(*center, *c))
    return (center, r)


def _contains(circle, p):
    (cx, cy), r = circle
    return _dist(cx, cy, p[0], p[1]) <= r * _REL_EPS


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _dist(x0, y0, x1, y1):
    dx = x1 - x0
    dy = y1 - y0
    return (dx * dx + dy * dy) ** 0.5
