"""Planar intercept geometry.

Defended assets are circles and threat trajectories are rays extended from
the current track state, so everything an engagement needs reduces to a
handful of circle/ray and wedge/ray problems: points of intersection with an
asset footprint, crossing windows through a weapon sector, lead pursuit
solutions and the gun elevation required to reach a target.

All operations are pure functions; the singular slope-intercept form of a
vertical trajectory is avoided by computing on the parametric ray, with the
slope and intercept exposed only where they are defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import kernels

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point2:
    """A point in the plane, in meters.  Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")


def euclidean_distance(p: Point2, q: Point2) -> float:
    """Straight-line distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def time_to_point(distance: float, speed: float) -> float:
    """Travel time over ``distance`` at constant ``speed``.

    Raises:
        ValueError: if ``distance`` is negative or ``speed`` is not positive.
    """
    if distance < 0.0:
        raise ValueError(f"distance must be non-negative, got {distance}")
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    return distance / speed


def _check_unit(direction: tuple[float, float], tol: float = 1e-9) -> None:
    norm = math.hypot(direction[0], direction[1])
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction must be a unit vector, |d| = {norm}")


@dataclass(frozen=True)
class ThreatLine:
    """A threat trajectory extended from the current track position.

    ``direction`` must be a unit vector.  The slope-intercept view is only
    defined for non-vertical lines and is exposed for diagnostics; all
    computations run on the parametric ray.
    """

    origin: Point2
    direction: tuple[float, float]

    def __post_init__(self):
        _check_unit(self.direction, tol=1e-12)

    @property
    def is_vertical(self) -> bool:
        return self.direction[0] == 0.0

    @property
    def slope(self) -> float:
        if self.is_vertical:
            raise ValueError("vertical line has no slope-intercept form")
        return self.direction[1] / self.direction[0]

    @property
    def intercept(self) -> float:
        return self.origin.y - self.slope * self.origin.x

    def point_at(self, t: float) -> Point2:
        return Point2(self.origin.x + t * self.direction[0],
                      self.origin.y + t * self.direction[1])


@dataclass(frozen=True)
class DAFootprint:
    """Circular footprint of a defended asset."""

    center: Point2
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")

    def contains(self, p: Point2) -> bool:
        return euclidean_distance(p, self.center) <= self.radius


@dataclass(frozen=True)
class WSSector:
    """Field of fire of a weapon system: an annular wedge plus an elevation cap.

    ``sweep_angle`` is in ``(0, 2*pi]``; a full sweep turns the wedge into an
    annulus.  Membership tests are closed on all boundaries.
    """

    origin: Point2
    min_range: float
    max_range: float
    start_angle: float
    sweep_angle: float
    max_elevation: float

    def __post_init__(self):
        if not 0.0 < self.min_range < self.max_range:
            raise ValueError(
                f"need 0 < min_range < max_range, got {self.min_range}, {self.max_range}")
        if not 0.0 < self.sweep_angle <= TWO_PI + 1e-12:
            raise ValueError(f"sweep_angle must be in (0, 2*pi], got {self.sweep_angle}")
        if not 0.0 < self.max_elevation <= math.pi / 2:
            raise ValueError(f"max_elevation must be in (0, pi/2], got {self.max_elevation}")

    def contains(self, p: Point2) -> bool:
        return bool(kernels.point_in_sector(
            p.x, p.y, self.origin.x, self.origin.y,
            self.min_range, self.max_range, self.start_angle, self.sweep_angle))


@dataclass(frozen=True)
class IntersectionSolution:
    """Quadratic coefficients and roots of a circle/line intersection.

    For non-vertical lines the coefficients are those of the quadratic in x
    obtained by substituting ``y = m x + c`` into the circle equation:

        a = 1 + m^2
        b = 2 (m c - x0 - m y0)
        c_coef = x0^2 + y0^2 + c^2 - r^2 - 2 y0 c

    For vertical lines they describe the unit-direction ray quadratic in t.
    The point count follows the discriminant: zero below ``-eps``, one within
    ``eps = 1e-9 * (1 + b^2)`` of zero (tangency), two above.
    """

    a: float
    b: float
    c_coef: float
    discriminant: float
    points: tuple[Point2, ...]


def circle_line_intersections(footprint: DAFootprint,
                              line: ThreatLine) -> IntersectionSolution:
    """All intersection points between a circle and an (infinite) line.

    An empty intersection is a valid result, not an error.  Returned points
    are sorted by (x, y) for determinism.
    """
    x0 = footprint.center.x
    y0 = footprint.center.y
    r = footprint.radius
    if not line.is_vertical:
        m = line.slope
        c = line.intercept
        a = 1.0 + m * m
        b = 2.0 * (m * c - x0 - m * y0)
        cc = x0 * x0 + y0 * y0 + c * c - r * r - 2.0 * y0 * c
        disc = b * b - 4.0 * a * cc
        eps = 1e-9 * (1.0 + b * b)
        if disc < -eps:
            points: tuple[Point2, ...] = ()
        elif disc <= eps:
            x = -b / (2.0 * a)
            points = (Point2(x, m * x + c),)
        else:
            s = math.sqrt(disc)
            xs = sorted(((-b - s) / (2.0 * a), (-b + s) / (2.0 * a)))
            points = tuple(Point2(x, m * x + c) for x in xs)
        return IntersectionSolution(a, b, cc, disc, points)

    # Vertical line: unit-direction ray quadratic, full line means both
    # signs of t are admitted.
    ox, oy = line.origin.x, line.origin.y
    dx, dy = line.direction
    fx = ox - x0
    fy = oy - y0
    a = 1.0
    b = 2.0 * (dx * fx + dy * fy)
    cc = fx * fx + fy * fy - r * r
    count, t0, t1 = kernels.ray_circle(ox, oy, dx, dy, x0, y0, r)
    disc = b * b - 4.0 * cc
    if count == 0:
        points = ()
    elif count == 1:
        points = (line.point_at(t0),)
    else:
        points = tuple(sorted((line.point_at(t0), line.point_at(t1)),
                              key=lambda p: (p.x, p.y)))
    return IntersectionSolution(a, b, cc, disc, points)


class PoiResult(NamedTuple):
    poi: Point2
    time_to_da: float


def earliest_poi(track_position: Point2, heading: tuple[float, float],
                 speed: float, footprint: DAFootprint) -> Optional[PoiResult]:
    """Earliest forward intersection of a track's extended path with a circle.

    Intersections behind the track (negative ray parameter) are discarded;
    the remaining point with the smallest travel time is returned, or None
    when the extended path misses the circle entirely.
    """
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    _check_unit(heading)
    count, t0, t1 = kernels.ray_circle(
        track_position.x, track_position.y, heading[0], heading[1],
        footprint.center.x, footprint.center.y, footprint.radius)
    if count == 0:
        return None
    forward = [t for t in ((t0,) if count == 1 else (t0, t1)) if t >= 0.0]
    if not forward:
        return None
    t = min(forward)
    poi = Point2(track_position.x + t * heading[0],
                 track_position.y + t * heading[1])
    return PoiResult(poi, t / speed)


class SectorCrossing(NamedTuple):
    entry: Point2
    exit: Point2
    entry_time: float
    exit_time: float


def sector_entry_exit(track_position: Point2, heading: tuple[float, float],
                      speed: float, sector: WSSector) -> Optional[SectorCrossing]:
    """Crossing window of a track's forward path through a weapon sector.

    Returns the first and last points where the forward ray lies inside the
    annular wedge (closed boundaries), with their travel times, or None when
    the ray never enters the sector.  A track already inside the sector has
    ``entry_time == 0``.  Grazing contacts of zero duration are reported as
    no crossing.
    """
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    _check_unit(heading)
    found, t_in, t_out = kernels.ray_sector_window(
        track_position.x, track_position.y, heading[0], heading[1],
        sector.origin.x, sector.origin.y, sector.min_range, sector.max_range,
        sector.start_angle, sector.sweep_angle)
    if not found or t_out - t_in <= 0.0:
        return None
    entry = Point2(track_position.x + t_in * heading[0],
                   track_position.y + t_in * heading[1])
    exit_ = Point2(track_position.x + t_out * heading[0],
                   track_position.y + t_out * heading[1])
    return SectorCrossing(entry, exit_, t_in / speed, t_out / speed)


def required_elevation(horizontal_distance: float, target_altitude: float) -> float:
    """Elevation angle needed to point at a target, in ``[0, pi/2)``.

    Raises:
        ValueError: on zero/negative horizontal distance (degenerate
            geometry, the angle is undefined) or negative altitude.
    """
    if horizontal_distance <= 0.0:
        raise ValueError(
            f"degenerate geometry: horizontal distance must be positive, got {horizontal_distance}")
    if target_altitude < 0.0:
        raise ValueError(f"altitude must be non-negative, got {target_altitude}")
    return math.atan2(target_altitude, horizontal_distance)


class LaunchSolution(NamedTuple):
    launch_point: Point2
    tof: float


def lead_and_launch(track_position: Point2, track_velocity: tuple[float, float],
                    ws: WSSector, projectile_speed: float) -> Optional[LaunchSolution]:
    """Lead pursuit solution: where to shoot so projectile and target meet.

    Solves ``|track_position + v*t - ws.origin| = projectile_speed * t`` for
    the smallest non-negative time of flight and predicts the target position
    at impact.  Returns None when no such time exists or the intercept point
    falls outside the sector wedge.
    """
    if projectile_speed <= 0.0:
        raise ValueError(f"projectile_speed must be positive, got {projectile_speed}")
    found, tof = kernels.lead_time_of_flight(
        track_position.x - ws.origin.x, track_position.y - ws.origin.y,
        track_velocity[0], track_velocity[1], projectile_speed)
    if not found:
        return None
    launch = Point2(track_position.x + track_velocity[0] * tof,
                    track_position.y + track_velocity[1] * tof)
    if not ws.contains(launch):
        return None
    return LaunchSolution(launch, tof)
