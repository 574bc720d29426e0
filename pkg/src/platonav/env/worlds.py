"""
Procedural worlds: canyon and forest generators, world phases for
environment-switch experiments, and post-crash respawn.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConfigError, ContractViolation, GenerationError
from .obstacles import FieldVariant, ObstacleField
from .vehicle import VehicleState

logger = logging.getLogger("PlatoNav.env")

GENERATORS = ("empty", "forest", "canyon")
# Bridson packings have a mean nearest-neighbour distance of roughly this multiple of the disk radius
POISSON_SPACING_RATIO = 1.15
SPACING_TOLERANCE = 0.03
SPACING_REFINEMENTS = 8
CANYON_LEAD_IN = 2.0


@dataclass(frozen=True)
class ForestConfig:
    """
    Periodic forest of equal cylinders.

    Args:
        extent: Side of the square tile in meters
        tree_radius: Cylinder radius in meters
        avg_spacing: Target mean nearest-neighbour distance between tree centres
        spawn_clearance: Radius around the origin kept free of trees
    """
    extent: float = 20.0
    tree_radius: float = 0.5
    avg_spacing: float = 6.5
    spawn_clearance: float = 2.0

    def __post_init__(self):
        if self.extent <= 0.0 or self.tree_radius <= 0.0:
            raise ConfigError("extent and tree_radius must be positive", field="world.forest")
        if self.avg_spacing <= 2.0 * self.tree_radius:
            raise ConfigError("avg_spacing must exceed the tree diameter", field="world.forest.avg_spacing")


@dataclass(frozen=True)
class CanyonConfig:
    """
    Winding corridor.

    Args:
        length: Centerline length in meters
        width: Corridor width in meters
        max_turn: Largest direction change per segment in radians
        segment_length: Centerline segment length in meters
        max_heading: Bound on the corridor direction relative to +x; 0 leaves it free
    """
    length: float = 120.0
    width: float = 4.0
    max_turn: float = math.pi / 4.0
    segment_length: float = 2.0
    max_heading: float = math.pi / 3.0

    def __post_init__(self):
        if self.length <= 0.0 or self.width <= 0.0 or self.segment_length <= 0.0:
            raise ConfigError("length, width and segment_length must be positive", field="world.canyon")
        if self.max_turn < 0.0 or self.max_heading < 0.0:
            raise ConfigError("max_turn and max_heading must be nonnegative", field="world.canyon")


@dataclass(frozen=True)
class WorldPhase:
    """Generator used from start_iteration onwards"""
    start_iteration: int = 1
    generator: str = "forest"

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator '{self.generator}'", field="world.switch_schedule.generator")
        if self.start_iteration < 1:
            raise ConfigError("start_iteration must be >= 1", field="world.switch_schedule.start_iteration")


@dataclass(frozen=True)
class WorldConfig:
    """
    World description for an experiment.

    Args:
        generator: One of "empty", "forest", "canyon"; used when no switch schedule is given
        forest: Forest parameters
        canyon: Canyon parameters
        switch_schedule: Ordered phases; overrides `generator` when non-empty
    """
    generator: str = "forest"
    forest: ForestConfig = ForestConfig()
    canyon: CanyonConfig = CanyonConfig()
    switch_schedule: Tuple[WorldPhase, ...] = ()

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator '{self.generator}'", field="world.generator")
        starts = [phase.start_iteration for phase in self.switch_schedule]
        if starts and (starts[0] != 1 or starts != sorted(set(starts))):
            raise ConfigError("switch_schedule must start at 1 and increase strictly",
                              field="world.switch_schedule")

    def generator_for_iteration(self, iteration):
        """Generator name active at a 1-based iteration"""
        generator = self.generator
        for phase in self.switch_schedule:
            if phase.start_iteration <= iteration:
                generator = phase.generator
        return generator

    def phase_index(self, iteration):
        """Index of the active phase (0 without a schedule)"""
        index = 0
        for i, phase in enumerate(self.switch_schedule):
            if phase.start_iteration <= iteration:
                index = i
        return index


def canyon_forest_canyon_schedule(iterations):
    """Canyon, then forest from the first third, then canyon again from the second third"""
    starts = [1, iterations // 3 + 1, (2 * iterations) // 3 + 1]
    generators = ["canyon", "forest", "canyon"]
    phases = {}
    for start, generator in zip(starts, generators):
        phases[start] = generator
    return tuple(WorldPhase(start_iteration=s, generator=g) for s, g in sorted(phases.items()))


def generate_empty():
    return ObstacleField(FieldVariant.EMPTY)


def generate_canyon(seed, length, width, max_turn, segment_length, max_heading=None, vehicle_radius=0.25):
    """
    Winding corridor with walls as line segments.

    The corridor starts with a short straight lead-in ending at the origin.
    Each following segment turns by a delta drawn uniformly from
    [-max_turn, max_turn]. With max_heading set, a delta that would take the
    direction beyond ±max_heading is drawn again, so the corridor never folds
    back on itself. Walls are mitred offsets of the centerline, so the
    corridor width is constant.

    Args:
        seed: Generation seed
        length: Centerline length in meters
        width: Corridor width in meters
        max_turn: Largest turn per segment in radians
        segment_length: Segment length in meters
        max_heading: Bound on the corridor direction relative to +x; None leaves it free
        vehicle_radius: Used to check that the vehicle fits

    Returns:
        ObstacleField tagged CANYON whose turns are the direction changes taken
    """
    if width <= 2.0 * vehicle_radius:
        raise ContractViolation(f"canyon width {width} does not fit a vehicle of radius {vehicle_radius}")
    if max_heading is not None and max_heading <= 0.0:
        raise ContractViolation("max_heading must be positive")
    rng = np.random.default_rng(seed)
    count = max(1, int(math.ceil(length / segment_length)))

    turns = np.empty(count)
    heading = 0.0
    for i in range(count):
        delta = rng.uniform(-max_turn, max_turn)
        while max_heading is not None and abs(heading + delta) > max_heading:
            delta = rng.uniform(-max_turn, max_turn)
        turns[i] = delta
        heading += delta
    directions = np.concatenate([[0.0], np.cumsum(turns)])
    lengths = np.full(len(directions), segment_length)
    lengths[0] = CANYON_LEAD_IN

    steps = lengths[:, None] * np.stack([np.cos(directions), np.sin(directions)], axis=1)
    centerline = np.vstack([[-CANYON_LEAD_IN, 0.0], np.cumsum(steps, axis=0) - steps[0]])

    half = 0.5 * width
    normals = np.zeros_like(centerline)
    offsets = np.full(len(centerline), half)
    for i in range(len(centerline)):
        before = directions[max(i - 1, 0)]
        after = directions[min(i, len(directions) - 1)]
        bisector = 0.5 * (before + after)
        normals[i] = (-math.sin(bisector), math.cos(bisector))
        offsets[i] = half / math.cos(0.5 * (after - before))
    left = centerline + offsets[:, None] * normals
    right = centerline - offsets[:, None] * normals
    segments = np.vstack([
        np.hstack([left[:-1], left[1:]]),
        np.hstack([right[:-1], right[1:]]),
    ])
    logger.debug(f"Generated canyon seed={seed} with {count} segments")
    return ObstacleField(FieldVariant.CANYON, segments=segments, seed=seed,
                         centerline=centerline, turns=turns)


def generate_forest(seed, extent, tree_radius, avg_spacing, vehicle_radius=0.25, spawn_clearance=2.0):
    """
    Periodic forest with Poisson-disk tree placement.

    Trees are at least 2 * tree_radius + 2 * vehicle_radius apart (centre to
    centre), so the vehicle always fits between two trees. The disk radius is
    refined until the mean nearest-neighbour spacing matches avg_spacing.
    Trees inside spawn_clearance of the origin are removed.

    Args:
        seed: Generation seed
        extent: Tile side in meters
        tree_radius: Cylinder radius
        avg_spacing: Target mean nearest-neighbour distance
        vehicle_radius: Vehicle collision radius
        spawn_clearance: Free radius around the origin

    Returns:
        ObstacleField tagged FOREST
    """
    if avg_spacing <= 2.0 * tree_radius:
        raise ContractViolation("avg_spacing must exceed the tree diameter")
    min_distance = 2.0 * tree_radius + 2.0 * vehicle_radius
    if avg_spacing < min_distance:
        raise GenerationError(
            f"avg_spacing {avg_spacing} is too dense for the minimum centre distance {min_distance}"
        )
    if 0.5 * extent <= spawn_clearance + tree_radius:
        return ObstacleField(FieldVariant.FOREST, seed=seed, extent=extent)

    rng = np.random.default_rng(seed)
    radius = max(min_distance, avg_spacing / POISSON_SPACING_RATIO)
    best_centres, best_error = None, np.inf
    for _ in range(SPACING_REFINEMENTS):
        centres = _poisson_disk_torus(extent, radius, rng)
        centres = _clear_spawn(centres, extent, spawn_clearance + tree_radius)
        spacing = _mean_nearest_neighbour(centres, extent)
        if spacing is None:
            break
        error = abs(spacing / avg_spacing - 1.0)
        if error < best_error:
            best_centres, best_error = centres, error
        if error < SPACING_TOLERANCE:
            break
        new_radius = max(min_distance, radius * avg_spacing / spacing)
        if new_radius == radius:
            break
        radius = new_radius
    if best_centres is None:
        best_centres = np.zeros((0, 2))
    elif best_error > 0.15 and radius == min_distance:
        raise GenerationError(
            f"cannot reach avg_spacing {avg_spacing} with minimum centre distance {min_distance}"
        )

    circles = np.hstack([best_centres, np.full((len(best_centres), 1), tree_radius)])
    logger.debug(f"Generated forest seed={seed} with {len(circles)} trees")
    return ObstacleField(FieldVariant.FOREST, circles=circles, seed=seed, extent=extent)


def _poisson_disk_torus(extent, radius, rng, attempts=30):
    """Bridson sampling on a torus of side extent; returns centres in [-extent/2, extent/2)"""
    cells = max(1, int(math.ceil(extent / (radius / math.sqrt(2.0)))))
    cell = extent / cells
    reach = int(math.ceil(radius / cell))
    grid = -np.ones((cells, cells), dtype=int)
    points = []

    def cell_of(p):
        return int(p[0] // cell) % cells, int(p[1] // cell) % cells

    def fits(p):
        cx, cy = cell_of(p)
        seen = set()
        for dx in range(-reach, reach + 1):
            for dy in range(-reach, reach + 1):
                key = ((cx + dx) % cells, (cy + dy) % cells)
                if key in seen:
                    continue
                seen.add(key)
                j = grid[key]
                if j >= 0:
                    delta = p - points[j]
                    delta -= extent * np.round(delta / extent)
                    if delta @ delta < radius * radius:
                        return False
        return True

    def add(p):
        points.append(p)
        grid[cell_of(p)] = len(points) - 1

    add(rng.uniform(0.0, extent, size=2))
    active = [0]
    while active:
        k = int(rng.integers(len(active)))
        origin = points[active[k]]
        placed = False
        for _ in range(attempts):
            r = rng.uniform(radius, 2.0 * radius)
            angle = rng.uniform(0.0, 2.0 * math.pi)
            candidate = np.mod(origin + r * np.array([math.cos(angle), math.sin(angle)]), extent)
            if fits(candidate):
                add(candidate)
                active.append(len(points) - 1)
                placed = True
                break
        if not placed:
            active.pop(k)
    return np.array(points) - 0.5 * extent


def _clear_spawn(centres, extent, clearance):
    if not len(centres):
        return centres
    wrapped = centres - extent * np.round(centres / extent)
    return centres[np.linalg.norm(wrapped, axis=1) >= clearance]


def _mean_nearest_neighbour(centres, extent):
    """Mean periodic nearest-neighbour distance, None for fewer than two points"""
    if len(centres) < 2:
        return None
    tree = cKDTree(np.mod(centres, extent), boxsize=extent)
    distances, _ = tree.query(np.mod(centres, extent), k=2)
    return float(np.mean(distances[:, 1]))


def mean_nearest_neighbour_spacing(field):
    """Mean nearest-neighbour distance between circle centres of a field"""
    if field.periodic:
        return _mean_nearest_neighbour(field.circles[:, :2], field.extent)
    if len(field.circles) < 2:
        return None
    distances, _ = cKDTree(field.circles[:, :2]).query(field.circles[:, :2], k=2)
    return float(np.mean(distances[:, 1]))


def build_field(world, generator, seed, vehicle_radius=0.25):
    """Generate the obstacle field for a named generator of a WorldConfig"""
    if generator == "empty":
        return generate_empty()
    if generator == "forest":
        f = world.forest
        return generate_forest(seed, f.extent, f.tree_radius, f.avg_spacing,
                               vehicle_radius=vehicle_radius, spawn_clearance=f.spawn_clearance)
    if generator == "canyon":
        c = world.canyon
        return generate_canyon(seed, c.length, c.width, c.max_turn, c.segment_length,
                               max_heading=c.max_heading or None, vehicle_radius=vehicle_radius)
    raise ConfigError(f"unknown generator '{generator}'", field="world.generator")


def respawn(field, rng, clearance=1.5, max_attempts=500):
    """
    Place the vehicle at rest at a pose with signed distance >= clearance.

    Args:
        field: ObstacleField
        rng: numpy Generator owned by the caller
        clearance: Required distance to the nearest obstacle (2 * d_safe in training)
        max_attempts: Candidate poses to try before giving up

    Returns:
        VehicleState at rest
    """
    for _ in range(max_attempts):
        position, heading = field.sample_spawn_pose(rng)
        if field.signed_distance(position) >= clearance:
            return VehicleState.at_rest(position, heading)
    raise GenerationError(f"no pose with clearance {clearance} found after {max_attempts} attempts")
