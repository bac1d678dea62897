"""Scalar geometry kernels.

These are the inner loops of the simulator: they run once per threat/asset
or threat/weapon pair on every decision cycle, so they are kept free of
Python objects (floats and small numpy arrays only) and compiled with numba
when acceleration is on (see :mod:`tewa.accel`).  The same bodies run
unchanged as plain Python when it is off.
"""

from __future__ import annotations

import math

import numpy as np

from .accel import NUMBA_ENABLED, maybe_njit

TWO_PI = 2.0 * math.pi


@maybe_njit
def ray_circle(ox, oy, dx, dy, cx, cy, r):
    """Intersect the ray ``o + t*d`` (|d| = 1) with a circle.

    Returns ``(count, t0, t1)`` with ``t0 <= t1``.  Tangency is classified
    with the scale-aware tolerance ``1e-9 * (1 + b^2)`` on the discriminant
    of the unit-direction quadratic ``t^2 + b t + c``.
    """
    fx = ox - cx
    fy = oy - cy
    b = 2.0 * (dx * fx + dy * fy)
    c = fx * fx + fy * fy - r * r
    disc = b * b - 4.0 * c
    eps = 1e-9 * (1.0 + b * b)
    if disc < -eps:
        return 0, 0.0, 0.0
    if disc <= eps:
        t = -0.5 * b
        return 1, t, t
    s = math.sqrt(disc)
    return 2, 0.5 * (-b - s), 0.5 * (-b + s)


@maybe_njit
def ray_segment(ox, oy, dx, dy, ax, ay, bx, by):
    """Intersect the ray ``o + t*d`` with the segment ``a..b``.

    Returns ``(hit, t)``; ``t`` is the ray parameter of the crossing.
    """
    ex = bx - ax
    ey = by - ay
    denom = dx * ey - dy * ex
    if abs(denom) < 1e-15:
        return False, 0.0
    qx = ax - ox
    qy = ay - oy
    t = (qx * ey - qy * ex) / denom
    u = (qx * dy - qy * dx) / denom
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return True, t
    return False, 0.0


@maybe_njit
def point_in_sector(px, py, ox, oy, min_r, max_r, start, sweep):
    """Closed-boundary membership test for the annular wedge of a sector."""
    rx = px - ox
    ry = py - oy
    d = math.sqrt(rx * rx + ry * ry)
    tol = 1e-9 * (1.0 + max_r)
    if d < min_r - tol or d > max_r + tol:
        return False
    if sweep >= TWO_PI - 1e-12:
        return True
    if d <= tol:
        return min_r <= tol
    theta = math.atan2(ry, rx)
    dd = (theta - start) % TWO_PI
    return dd <= sweep + 1e-12 or TWO_PI - dd <= 1e-12


@maybe_njit
def ray_sector_window(ox, oy, dx, dy, sox, soy, min_r, max_r, start, sweep):
    """First and last ray parameters inside an annular wedge.

    Candidate boundary crossings (the two arcs and, unless the sweep is a
    full turn, the two radial edges) split the forward ray into intervals;
    each interval is classified by testing its midpoint.  Returns
    ``(found, t_enter, t_exit)`` where the window may span several disjoint
    inside intervals (enter = start of the first, exit = end of the last).
    """
    cand = np.empty(10, np.float64)
    n = 0
    cand[n] = 0.0
    n += 1
    k, t0, t1 = ray_circle(ox, oy, dx, dy, sox, soy, min_r)
    if k >= 1 and t0 > 0.0:
        cand[n] = t0
        n += 1
    if k == 2 and t1 > 0.0:
        cand[n] = t1
        n += 1
    k, t0, t1 = ray_circle(ox, oy, dx, dy, sox, soy, max_r)
    if k >= 1 and t0 > 0.0:
        cand[n] = t0
        n += 1
    if k == 2 and t1 > 0.0:
        cand[n] = t1
        n += 1
    if sweep < TWO_PI - 1e-12:
        ca = math.cos(start)
        sa = math.sin(start)
        hit, t = ray_segment(
            ox, oy, dx, dy,
            sox + min_r * ca, soy + min_r * sa,
            sox + max_r * ca, soy + max_r * sa,
        )
        if hit and t > 0.0:
            cand[n] = t
            n += 1
        end = start + sweep
        cb = math.cos(end)
        sb = math.sin(end)
        hit, t = ray_segment(
            ox, oy, dx, dy,
            sox + min_r * cb, soy + min_r * sb,
            sox + max_r * cb, soy + max_r * sb,
        )
        if hit and t > 0.0:
            cand[n] = t
            n += 1
    ts = np.sort(cand[:n])
    found = False
    t_in = -1.0
    t_out = -1.0
    for i in range(n - 1):
        a = ts[i]
        b = ts[i + 1]
        if b - a <= 1e-12:
            continue
        m = 0.5 * (a + b)
        if point_in_sector(ox + m * dx, oy + m * dy, sox, soy, min_r, max_r, start, sweep):
            if not found:
                found = True
                t_in = a
            t_out = b
    return found, t_in, t_out


@maybe_njit
def lead_time_of_flight(rx, ry, vx, vy, proj_speed):
    """Smallest non-negative ``t`` with ``|r + v t| = proj_speed * t``.

    ``r`` is the shooter-to-target offset and ``v`` the target velocity.
    Returns ``(found, t)``.
    """
    a = vx * vx + vy * vy - proj_speed * proj_speed
    b = 2.0 * (rx * vx + ry * vy)
    c = rx * rx + ry * ry
    if abs(a) < 1e-12 * proj_speed * proj_speed:
        # target speed matches the projectile: the quadratic degenerates
        if abs(b) < 1e-300:
            return False, 0.0
        t = -c / b
        if t >= 0.0:
            return True, t
        return False, 0.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return False, 0.0
    s = math.sqrt(disc)
    t1 = (-b - s) / (2.0 * a)
    t2 = (-b + s) / (2.0 * a)
    lo = min(t1, t2)
    hi = max(t1, t2)
    if lo >= 0.0:
        return True, lo
    if hi >= 0.0:
        return True, hi
    return False, 0.0


@maybe_njit
def _ray_circle_batch_jit(ox, oy, dx, dy, cx, cy, r, counts, t0s, t1s):
    for i in range(ox.shape[0]):
        k, t0, t1 = ray_circle(ox[i], oy[i], dx[i], dy[i], cx[i], cy[i], r[i])
        counts[i] = k
        t0s[i] = t0
        t1s[i] = t1


def _ray_circle_batch_numpy(ox, oy, dx, dy, cx, cy, r, counts, t0s, t1s):
    fx = ox - cx
    fy = oy - cy
    b = 2.0 * (dx * fx + dy * fy)
    c = fx * fx + fy * fy - r * r
    disc = b * b - 4.0 * c
    eps = 1e-9 * (1.0 + b * b)
    counts[:] = np.where(disc < -eps, 0, np.where(disc <= eps, 1, 2))
    s = np.sqrt(np.maximum(disc, 0.0))
    tangent = counts == 1
    t0s[:] = np.where(tangent, -0.5 * b, 0.5 * (-b - s))
    t1s[:] = np.where(tangent, -0.5 * b, 0.5 * (-b + s))
    t0s[counts == 0] = 0.0
    t1s[counts == 0] = 0.0


def ray_circle_batch(ox, oy, dx, dy, cx, cy, r):
    """Vectorized :func:`ray_circle` over equal-length float64 arrays.

    Dispatches to the numba loop when acceleration is on and to a pure-numpy
    implementation otherwise; both produce identical classifications.
    """
    n = len(ox)
    counts = np.empty(n, np.int64)
    t0s = np.empty(n, np.float64)
    t1s = np.empty(n, np.float64)
    if NUMBA_ENABLED:
        _ray_circle_batch_jit(ox, oy, dx, dy, cx, cy, r, counts, t0s, t1s)
    else:
        _ray_circle_batch_numpy(ox, oy, dx, dy, cx, cy, r, counts, t0s, t1s)
    return counts, t0s, t1s


_warmed_up = False


def warmup() -> None:
    """Trigger one compilation of every kernel so JIT cost never lands
    inside a timed decision cycle.  Cheap after the first call."""
    global _warmed_up
    if _warmed_up:
        return
    ray_circle(0.0, 0.0, 1.0, 0.0, 5.0, 0.0, 1.0)
    ray_segment(0.0, 0.0, 1.0, 0.0, 2.0, -1.0, 2.0, 1.0)
    point_in_sector(1.0, 0.0, 0.0, 0.0, 0.5, 2.0, 0.0, TWO_PI)
    ray_sector_window(-5.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5, 2.0, 0.0, TWO_PI)
    lead_time_of_flight(10.0, 0.0, 0.0, 1.0, 50.0)
    one = np.ones(1, np.float64)
    ray_circle_batch(one * -5.0, one * 0.0, one, one * 0.0, one * 0.0, one * 0.0, one)
    _warmed_up = True
