"""
Obstacle fields: immutable circle/segment geometry with signed-distance and
ray-cast queries.
"""

from enum import Enum

import numpy as np

from ..errors import ContractViolation
from .vehicle import VehicleState

RAY_PARALLEL_TOLERANCE = 1e-12


class FieldVariant(Enum):
    EMPTY = "empty"
    CANYON = "canyon"
    FOREST = "forest"


class ObstacleField:
    """
    Immutable obstacle geometry.

    Forest fields are periodic: the square tile of side `extent` centred on
    the origin repeats over the plane, so a vehicle flying in any direction
    stays inside the world. Canyon fields are finite and expose an end line;
    crossing it is a lap, not a crash.

    Args:
        variant: FieldVariant tag
        circles: Array (k, 3) of (cx, cy, radius)
        segments: Array (s, 4) of (x1, y1, x2, y2)
        seed: Generation seed (None for hand-built fields)
        extent: Tile side for periodic fields, None otherwise
        spawn_point: Default spawn position
        spawn_heading: Default spawn heading
        centerline: Canyon centerline vertices (n, 2), if any
        turns: Per-segment direction changes the centerline takes, if any
    """

    def __init__(self, variant, circles=None, segments=None, seed=None, extent=None,
                 spawn_point=(0.0, 0.0), spawn_heading=0.0, centerline=None, turns=None):
        self.variant = FieldVariant(variant)
        self.circles = _frozen(circles, (0, 3))
        self.segments = _frozen(segments, (0, 4))
        self.seed = seed
        self.extent = None if extent is None else float(extent)
        self.spawn_point = np.array(spawn_point, dtype=float)
        self.spawn_point.setflags(write=False)
        self.spawn_heading = float(spawn_heading)
        self.centerline = None if centerline is None else _frozen(centerline, (0, 2))
        self.turns = None if turns is None else _frozen(turns, (0,))

        if self.periodic and len(self.circles):
            offsets = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float) * self.extent
            tiled = self.circles[None, :, :].repeat(len(offsets), axis=0)
            tiled[:, :, :2] += offsets[:, None, :]
            self._query_circles = tiled.reshape(-1, 3)
        else:
            self._query_circles = self.circles

    @property
    def periodic(self):
        return self.extent is not None

    @property
    def primitive_count(self):
        return len(self.circles) + len(self.segments)

    def wrap(self, points):
        """Map points into the canonical tile of a periodic field"""
        points = np.asarray(points, dtype=float)
        if not self.periodic:
            return points
        half = 0.5 * self.extent
        return np.mod(points + half, self.extent) - half

    def signed_distances(self, points):
        """
        Signed distance to the nearest surface for a batch of points.

        Args:
            points: Array (n, 2)

        Returns:
            Tuple (distances (n,), gradients (n, 2)); +inf and zero gradient
            when the field is empty
        """
        points = self.wrap(np.atleast_2d(points))
        n = points.shape[0]
        best = np.full(n, np.inf)
        grad = np.zeros((n, 2))
        if len(self._query_circles):
            delta = points[:, None, :] - self._query_circles[None, :, :2]
            norm = np.linalg.norm(delta, axis=-1)
            dist = norm - self._query_circles[None, :, 2]
            idx = np.argmin(dist, axis=1)
            rows = np.arange(n)
            best = dist[rows, idx]
            chosen = delta[rows, idx]
            chosen_norm = norm[rows, idx]
            safe = chosen_norm > 0.0
            grad[safe] = chosen[safe] / chosen_norm[safe, None]
            grad[~safe] = (1.0, 0.0)
        if len(self.segments):
            seg_dist, seg_grad = _segment_distances(points, self.segments)
            closer = seg_dist < best
            best = np.where(closer, seg_dist, best)
            grad[closer] = seg_grad[closer]
        return best, grad

    def signed_distance(self, point):
        distances, _ = self.signed_distances(np.asarray(point, dtype=float).reshape(1, 2))
        return float(distances[0])

    def raycast(self, origin, angles, max_range):
        """
        First-hit distance along each ray, clipped to max_range.

        A ray starting inside a circle reads 0.

        Args:
            origin: Ray origin (2,)
            angles: Ray directions in radians (R,)
            max_range: Sensor range in meters

        Returns:
            Array (R,) of ranges in [0, max_range]
        """
        origin = self.wrap(np.asarray(origin, dtype=float).reshape(2))
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        ranges = np.full(len(angles), float(max_range))

        if len(self._query_circles):
            oc = origin[None, :] - self._query_circles[:, :2]
            b = directions @ oc.T
            c = np.sum(oc * oc, axis=1) - self._query_circles[:, 2] ** 2
            disc = b * b - c[None, :]
            root = np.sqrt(np.maximum(disc, 0.0))
            t_near = -b - root
            t_far = -b + root
            hit = np.where(t_near >= 0.0, t_near, np.where(t_far >= 0.0, 0.0, np.inf))
            hit = np.where(disc >= 0.0, hit, np.inf)
            ranges = np.minimum(ranges, hit.min(axis=1))

        if len(self.segments):
            a = self.segments[:, :2]
            edge = self.segments[:, 2:] - a
            ao = a - origin[None, :]
            denom = directions[:, 0:1] * edge[None, :, 1] - directions[:, 1:2] * edge[None, :, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (ao[None, :, 0] * edge[None, :, 1] - ao[None, :, 1] * edge[None, :, 0]) / denom
                s = (ao[None, :, 0] * directions[:, 1:2] - ao[None, :, 1] * directions[:, 0:1]) / denom
            valid = (np.abs(denom) > RAY_PARALLEL_TOLERANCE) & (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
            hit = np.where(valid, t, np.inf)
            ranges = np.minimum(ranges, hit.min(axis=1))

        return np.clip(ranges, 0.0, max_range)

    def out_of_course(self, position):
        """True once a canyon run has left through either open end of the corridor"""
        if self.variant is not FieldVariant.CANYON or self.centerline is None or len(self.centerline) < 2:
            return False
        position = np.asarray(position, dtype=float)
        end = self.centerline[-1]
        if float(np.dot(position - end, end - self.centerline[-2])) > 0.0:
            return True
        start = self.centerline[0]
        return float(np.dot(position - start, self.centerline[1] - start)) < 0.0

    def sample_spawn_pose(self, rng):
        """
        Candidate (position, heading) for a respawn; callers check clearance.

        Forests sample the whole tile, canyons sample the first 80% of the
        centerline, empty fields always return the default spawn pose.
        """
        if self.variant is FieldVariant.FOREST and self.periodic:
            half = 0.5 * self.extent
            return rng.uniform(-half, half, size=2), self.spawn_heading
        if self.variant is FieldVariant.CANYON and self.centerline is not None and len(self.centerline) > 2:
            last = max(1, int(0.8 * (len(self.centerline) - 1)))
            i = int(rng.integers(0, last))
            direction = self.centerline[i + 1] - self.centerline[i]
            return self.centerline[i].copy(), float(np.arctan2(direction[1], direction[0]))
        return self.spawn_point.copy(), self.spawn_heading

    def to_listing(self):
        """Plain-text geometry listing, one primitive per line"""
        lines = [f"# variant {self.variant.value}"]
        if self.seed is not None:
            lines.append(f"# seed {self.seed}")
        if self.periodic:
            lines.append(f"# extent {self.extent!r}")
        for cx, cy, r in self.circles:
            lines.append(f"circle {float(cx)!r} {float(cy)!r} {float(r)!r}")
        for x1, y1, x2, y2 in self.segments:
            lines.append(f"segment {float(x1)!r} {float(y1)!r} {float(x2)!r} {float(y2)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_listing(cls, text):
        """Parse a listing written by to_listing"""
        variant, seed, extent = FieldVariant.EMPTY, None, None
        circles, segments = [], []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.lstrip("#").split()
            if line.startswith("#"):
                if len(parts) == 2 and parts[0] == "variant":
                    variant = FieldVariant(parts[1])
                elif len(parts) == 2 and parts[0] == "seed":
                    seed = int(parts[1])
                elif len(parts) == 2 and parts[0] == "extent":
                    extent = float(parts[1])
                continue
            if parts[0] == "circle" and len(parts) == 4:
                circles.append([float(v) for v in parts[1:]])
            elif parts[0] == "segment" and len(parts) == 5:
                segments.append([float(v) for v in parts[1:]])
            else:
                raise ContractViolation(f"line {number}: cannot parse geometry '{raw}'")
        return cls(variant, circles=circles, segments=segments, seed=seed, extent=extent)


def _frozen(values, empty_shape):
    if values is None or len(values) == 0:
        array = np.zeros(empty_shape)
    else:
        array = np.array(values, dtype=float).reshape((-1,) + empty_shape[1:])
    array.setflags(write=False)
    return array


def _segment_distances(points, segments):
    a = segments[:, :2]
    edge = segments[:, 2:] - a
    length_sq = np.sum(edge * edge, axis=1)
    rel = points[:, None, :] - a[None, :, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(length_sq > 0.0, np.sum(rel * edge[None], axis=-1) / length_sq, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a[None] + t[..., None] * edge[None]
    delta = points[:, None, :] - closest
    dist = np.linalg.norm(delta, axis=-1)
    idx = np.argmin(dist, axis=1)
    rows = np.arange(points.shape[0])
    best = dist[rows, idx]
    chosen = delta[rows, idx]
    grad = np.zeros_like(chosen)
    safe = best > 0.0
    grad[safe] = chosen[safe] / best[safe, None]
    return best, grad


def signed_distance(field, point):
    """Distance from point to the nearest obstacle surface, negative inside"""
    point = np.asarray(point, dtype=float)
    if point.shape != (2,) or not np.all(np.isfinite(point)):
        raise ContractViolation("point must be a finite 2-vector")
    return field.signed_distance(point)


def beam_angles(heading, beam_count, fan_angle):
    """Beam directions spanning fan_angle symmetrically around the heading"""
    if beam_count < 1:
        raise ContractViolation("beam_count must be at least 1")
    if beam_count == 1:
        return np.array([heading], dtype=float)
    return heading + np.linspace(-0.5 * fan_angle, 0.5 * fan_angle, beam_count)


def raycast_laser(field, state, beam_count, fan_angle, max_range):
    """
    Noise-free laser ranges from the vehicle pose.

    Args:
        field: ObstacleField
        state: VehicleState
        beam_count: Number of beams
        fan_angle: Total fan width in radians
        max_range: Range reported when nothing is hit

    Returns:
        Array (beam_count,) of ranges
    """
    angles = beam_angles(state.heading, beam_count, fan_angle)
    return field.raycast(state.position, angles, max_range)


def crash_check(field, state, vehicle_radius):
    """True iff signed distance at the vehicle position is strictly below its radius"""
    if isinstance(state, VehicleState):
        position = state.position
    else:
        position = np.asarray(state, dtype=float)[:2]
    return field.signed_distance(position) < vehicle_radius
