"""Procedural cluttered container layouts with synthetic demonstrations."""

import logging
from dataclasses import asdict, dataclass

import numpy as np

from src.apps.common.exceptions import GenerationFailure
from src.apps.eikonal.fields import target_sources
from src.apps.eikonal.fmm import march
from src.apps.planner.trajectory import Trajectory6

from .constants import Archetype, DemonstrationConfig, ErrorMessages, GeneratorConfig, GridConfig, JointKind, Role, Shape
from .grids import Bounds, GridGeometry
from .solids import Articulation, Scene, Solid, closest_surface_point, contains, unsigned_distance
from .voxels import occupancy_mask


logger = logging.getLogger(__name__)

IDENTITY_QUATERNION = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class GeneratorParams:
    archetype: str = Archetype.SHELF
    obstacle_count: int = GeneratorConfig.OBSTACLE_COUNT
    scale: float = None
    scale_range: tuple = GeneratorConfig.SCALE_RANGE
    reshape_range: tuple = GeneratorConfig.RESHAPE_RANGE
    placement_height_range: tuple = GeneratorConfig.PLACEMENT_HEIGHT_RANGE
    door_open: bool = True
    spacing: float = GridConfig.SPACING
    cube_size: float = GridConfig.CUBE_SIZE
    max_attempts: int = GeneratorConfig.MAX_ATTEMPTS

    def __post_init__(self):
        if self.archetype not in Archetype.values:
            raise ValueError(f"Unknown archetype {self.archetype}.")
        object.__setattr__(self, "scale_range", tuple(self.scale_range))
        object.__setattr__(self, "reshape_range", tuple(self.reshape_range))
        object.__setattr__(self, "placement_height_range", tuple(self.placement_height_range))

    def to_dict(self):
        data = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


def box_between(solid_id, role, lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return Solid(solid_id, Shape.BOX, tuple(0.5 * (lo + hi)), IDENTITY_QUATERNION, tuple(hi - lo), role)


@dataclass
class _Draft:
    solids: list
    target: Solid
    interior: tuple
    opening: tuple
    rim: float


def _container_shell(prefix, depth, width, height, floor_z, thickness, front_x=0.0):
    """
    Five boards around the interior ``x in [front_x - depth, front_x]``,
    ``|y| <= width / 2``, ``z in [floor_z, floor_z + height]``.
    """
    t = thickness
    back = front_x - depth
    half = 0.5 * width
    top = floor_z + height
    return [
        box_between(f"{prefix}-floor", Role.CONTAINER_SHELL, (back - t, -half - t, floor_z - t), (front_x, half + t, floor_z)),
        box_between(f"{prefix}-top", Role.CONTAINER_SHELL, (back - t, -half - t, top), (front_x, half + t, top + t)),
        box_between(f"{prefix}-left", Role.CONTAINER_SHELL, (back - t, -half - t, floor_z), (front_x, -half, top)),
        box_between(f"{prefix}-right", Role.CONTAINER_SHELL, (back - t, half, floor_z), (front_x, half + t, top)),
        box_between(f"{prefix}-back", Role.CONTAINER_SHELL, (back - t, -half, floor_z), (back, half, top)),
    ]


def _target(rng, x, y, floor_z):
    radius = rng.uniform(*GeneratorConfig.TARGET_RADIUS_RANGE)
    height = rng.uniform(*GeneratorConfig.TARGET_HEIGHT_RANGE)
    return Solid("target", Shape.CYLINDER, (x, y, floor_z + 0.5 * height), IDENTITY_QUATERNION, (radius, height), Role.TARGET)


def _footprint_radius(solid):
    if solid.shape == Shape.CYLINDER:
        return solid.dims[0]
    if solid.shape == Shape.SPHERE:
        return solid.dims[0]
    return 0.5 * float(np.hypot(solid.dims[0], solid.dims[1]))


def _place_obstacles(rng, params, target, x_range, y_range, floor_z, max_height):
    """
    Reshaped obstacles shifted at random on the floor, without overlapping
    the target or each other.
    """
    placed = []
    for index in range(params.obstacle_count):
        factor = rng.uniform(*params.reshape_range)
        use_box = rng.random() < 0.5
        for _ in range(24):
            if use_box:
                size = np.array([0.05, 0.05, min(0.10 * factor, max_height)]) * [factor, factor, 1.0]
                footprint = 0.5 * float(np.hypot(size[0], size[1]))
            else:
                radius = 0.03 * factor
                height = min(0.10 * factor, max_height)
                footprint = radius
            x = rng.uniform(x_range[0] + footprint, x_range[1] - footprint)
            y = rng.uniform(y_range[0] + footprint, y_range[1] - footprint)
            others = [target] + placed
            clear = all(
                np.hypot(x - other.position[0], y - other.position[1])
                > footprint + _footprint_radius(other) + GeneratorConfig.PLACEMENT_GAP
                for other in others
            )
            if not clear:
                continue
            if use_box:
                solid = Solid(f"obstacle-{index}", Shape.BOX, (x, y, floor_z + 0.5 * size[2]),
                              IDENTITY_QUATERNION, tuple(size), Role.OBSTACLE)
            else:
                solid = Solid(f"obstacle-{index}", Shape.CYLINDER, (x, y, floor_z + 0.5 * height),
                              IDENTITY_QUATERNION, (radius, height), Role.OBSTACLE)
            placed.append(solid)
            break
        else:
            raise GenerationFailure(f"could not place obstacle {index}")
    return placed


def _shelf(rng, params, scale):
    depth = GeneratorConfig.BASE_INTERIOR_DEPTH * scale
    width = GeneratorConfig.BASE_INTERIOR_WIDTH * scale
    height = GeneratorConfig.BASE_INTERIOR_HEIGHT * scale
    floor_z = rng.uniform(*params.placement_height_range)
    t = GeneratorConfig.BOARD_THICKNESS

    solids = _container_shell("shelf", depth, width, height, floor_z, t)
    lateral = 0.5 * width - 0.06
    target = _target(
        rng,
        -GeneratorConfig.TARGET_DEPTH_FRACTION * depth + rng.uniform(-0.02, 0.02),
        rng.uniform(-lateral, lateral) * 0.5,
        floor_z,
    )
    obstacles = _place_obstacles(
        rng, params, target, (-depth, 0.0), (-0.5 * width, 0.5 * width), floor_z, height - 0.03
    )
    return _Draft(solids + [target] + obstacles, target, (width, depth, height), (1.0, 0.0, 0.0), 0.0)


def _cabinet(rng, params, scale):
    draft = _shelf(rng, params, scale)
    width, depth, height = draft.interior
    floor_z = draft.target.position[2] - 0.5 * draft.target.dims[1]
    t = GeneratorConfig.BOARD_THICKNESS
    door = box_between("door", Role.DOOR, (0.0, -0.5 * width - t, floor_z - t), (t, 0.5 * width + t, floor_z + height + t))
    hinge = Articulation(
        axis=(0.0, 0.0, 1.0),
        kind=JointKind.HINGE,
        range=(0.0, 0.5 * np.pi),
        value=0.0,
        pivot=(0.5 * t, 0.5 * width + t, floor_z),
    )
    door = Solid(door.id, Shape.ORIENTED_BOX, door.position, door.quaternion, door.dims, Role.DOOR, hinge)
    if params.door_open:
        door = door.at_articulation(0.5 * np.pi)
    draft.solids.append(door)
    draft.rim = 0.0
    return draft


def _drawer(rng, params, scale):
    depth = GeneratorConfig.BASE_INTERIOR_DEPTH * scale
    width = GeneratorConfig.BASE_INTERIOR_WIDTH * scale
    wall = GeneratorConfig.DRAWER_WALL_HEIGHT
    pull = GeneratorConfig.DRAWER_PULL * scale
    floor_z = rng.uniform(*params.placement_height_range)
    t = GeneratorConfig.BOARD_THICKNESS
    half = 0.5 * width
    back = pull - depth

    solids = [
        box_between("tray-floor", Role.CONTAINER_SHELL, (back - t, -half - t, floor_z - t), (pull, half + t, floor_z)),
        box_between("tray-left", Role.CONTAINER_SHELL, (back - t, -half - t, floor_z), (pull, -half, floor_z + wall)),
        box_between("tray-right", Role.CONTAINER_SHELL, (back - t, half, floor_z), (pull, half + t, floor_z + wall)),
        box_between("tray-back", Role.CONTAINER_SHELL, (back - t, -half, floor_z), (back, half, floor_z + wall)),
        box_between("carcass", Role.CONTAINER_SHELL, (-depth - t, -half - t, floor_z + wall + 0.02),
                    (0.0, half + t, floor_z + wall + 0.02 + 0.3 * scale)),
    ]
    front = box_between("drawer-front", Role.DRAWER, (pull, -half - t, floor_z - t), (pull + t, half + t, floor_z + wall + 0.04))
    slide = Articulation(axis=(1.0, 0.0, 0.0), kind=JointKind.PRISMATIC, range=(0.0, 0.3), value=pull)
    solids.append(Solid(front.id, Shape.BOX, front.position, front.quaternion, front.dims, Role.DRAWER, slide))

    target = _target(rng, pull - 0.5 * depth + rng.uniform(-0.03, 0.03), rng.uniform(-0.3, 0.3) * half, floor_z)
    x_range = (max(back, 0.0 + 0.01), pull)
    obstacles = _place_obstacles(rng, params, target, x_range, (-half, half), floor_z, 0.15)
    rim = floor_z + wall + 0.04
    return _Draft(solids + [target] + obstacles, target, (width, depth, wall), (0.0, 0.0, 1.0), rim)


def _open(rng, params, scale):
    floor_z = rng.uniform(*params.placement_height_range)
    slab = box_between("support", Role.CONTAINER_SHELL, (-0.25, -0.25, floor_z - 0.03), (0.25, 0.25, floor_z))
    target = _target(rng, rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), floor_z)
    obstacles = _place_obstacles(rng, params, target, (-0.25, -0.02), (-0.25, 0.25), floor_z, 0.2)
    return _Draft([slab, target] + obstacles, target, (0.5, 0.5, 0.0), (1.0, 0.0, 0.0), target.position[0] + 0.1)


_BUILDERS = {
    Archetype.SHELF: _shelf,
    Archetype.CABINET: _cabinet,
    Archetype.DRAWER: _drawer,
    Archetype.OPEN: _open,
}


def _descend(arrival, occupied, start):
    """
    Walk from ``start`` to the lowest reachable arrival through the
    26-neighborhood. Diagonal moves must not cut occupied corners.
    """
    shape = arrival.shape
    offsets = [
        np.array((dx, dy, dz))
        for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)
        if (dx, dy, dz) != (0, 0, 0)
    ]
    path = [np.asarray(start)]
    current = np.asarray(start)
    while True:
        best, best_value = None, arrival[tuple(current)]
        for offset in offsets:
            candidate = current + offset
            if np.any(candidate < 0) or np.any(candidate >= shape):
                continue
            value = arrival[tuple(candidate)]
            if not value < best_value:
                continue
            axes = np.nonzero(offset)[0]
            corners_free = True
            for mask in range(1, 2 ** len(axes) - 1):
                corner = current.copy()
                for bit, axis in enumerate(axes):
                    if mask >> bit & 1:
                        corner[axis] += offset[axis]
                if occupied[tuple(corner)]:
                    corners_free = False
                    break
            if corners_free:
                best, best_value = candidate, value
        if best is None:
            return path
        current = best
        path.append(current)


def _smooth(points, solids, obstacles, passes):
    """
    Laplacian smoothing of interior points, rejecting moves that enter a
    solid or lose clearance below half of the original.
    """
    points = points.copy()
    if len(points) < 3:
        return points
    clearance = unsigned_distance(points, obstacles) if obstacles else np.full(len(points), np.inf)
    for _ in range(passes):
        proposal = points.copy()
        proposal[1:-1] = 0.5 * points[1:-1] + 0.25 * (points[:-2] + points[2:])
        inside = np.zeros(len(points), dtype=bool)
        for solid in solids:
            inside |= contains(proposal, solid)
        new_clearance = unsigned_distance(proposal, obstacles) if obstacles else np.full(len(points), np.inf)
        accept = ~inside & (new_clearance >= 0.5 * clearance)
        accept[0] = accept[-1] = False
        points[accept] = proposal[accept]
    return points


def resample_polyline(points, spacing):
    """
    Points at uniform arc-length ``spacing``; the last point is kept.
    """
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(steps)])
    keep = np.concatenate([[True], steps > 1e-12])
    arc, points = arc[keep], points[keep]
    if arc[-1] == 0.0:
        return points[:1]
    count = max(int(np.ceil(arc[-1] / spacing)), 1)
    stations = np.linspace(0.0, arc[-1], count + 1)
    return np.stack([np.interp(stations, arc, points[:, axis]) for axis in range(3)], axis=1)


def approach_speeds(points):
    """
    Cruise speed ramping down linearly to the contact speed over the final
    slowdown distance.
    """
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    remaining = np.concatenate([np.cumsum(steps[::-1])[::-1], [0.0]])
    ramp = np.clip(remaining / DemonstrationConfig.SLOWDOWN_DISTANCE, 0.0, 1.0)
    cruise, contact = DemonstrationConfig.CRUISE_SPEED, DemonstrationConfig.CONTACT_SPEED
    return contact + (cruise - contact) * ramp


def _voxel_collisions(points, obstacle_mask, geometry):
    hits = 0
    for point in points:
        cell = geometry.cell_of(point)
        if cell is not None and obstacle_mask[cell]:
            hits += 1
    return hits


def synthesize_demonstration(scene, rng, geometry, opening=None, rim=None):
    """
    Clearance-weighted geodesic from a random exterior start to the target
    surface, resampled at half a voxel with an approach slowdown.
    """
    occupied = occupancy_mask(scene.solids, geometry)
    obstacle_mask = occupancy_mask(scene.obstacles, geometry)
    centers = geometry.cell_centers()
    flat_centers = centers.reshape(-1, 3)
    obstacles = list(scene.obstacles)
    if obstacles:
        clearance = unsigned_distance(flat_centers, obstacles).reshape(geometry.dims)
    else:
        clearance = np.full(geometry.dims, np.inf)
    speed = np.minimum(1.0, clearance / DemonstrationConfig.CLEARANCE_REFERENCE)
    speed[occupied] = 0.0
    sources = target_sources(scene, geometry, occupied)
    if not sources:
        raise GenerationFailure("target has no free neighborhood")
    arrival, _ = march(speed, geometry.spacing, sources)

    target_center = scene.target.center
    opening = np.asarray(opening if opening is not None else scene.opening_direction(), dtype=float)
    if rim is None:
        rim = float(target_center @ opening) + 0.1
    exterior = centers @ opening >= rim + GeneratorConfig.START_MARGIN
    all_clearance = unsigned_distance(flat_centers, scene.solids).reshape(geometry.dims)
    candidates = exterior & np.isfinite(arrival) & ~occupied & (all_clearance >= GeneratorConfig.START_CLEARANCE)
    options = np.argwhere(candidates)
    if len(options) == 0:
        raise GenerationFailure("no reachable exterior start")
    start = options[rng.integers(len(options))]

    cells = _descend(arrival, occupied, start)
    points = geometry.cell_center(np.array(cells))
    contact = closest_surface_point(points[-1], scene.target)
    raw = np.vstack([points, contact])

    spacing = 0.5 * geometry.spacing
    smoothed = resample_polyline(
        _smooth(raw, scene.solids, obstacles, DemonstrationConfig.SMOOTHING_PASSES), spacing
    )
    fallback = resample_polyline(raw, spacing)
    for polyline in (smoothed, fallback):
        if len(polyline) < 2:
            continue
        if _voxel_collisions(polyline, obstacle_mask, geometry):
            continue
        inside = np.zeros(len(polyline) - 1, dtype=bool)
        for solid in scene.solids:
            inside |= contains(polyline[:-1], solid)
        if inside.any():
            continue
        demo = Trajectory6.from_path(polyline, approach_speeds(polyline))
        logger.debug("Demonstration with %d samples, length %.3f m", len(demo), demo.length)
        return demo
    raise GenerationFailure("demonstration collides after resampling")


def generate_scene(seed, params=None):
    """
    Deterministic cluttered layout and its demonstration for ``seed``.
    """
    params = params or GeneratorParams()
    rng = np.random.default_rng(seed)
    builder = _BUILDERS[params.archetype]
    for attempt in range(params.max_attempts):
        scale = params.scale if params.scale is not None else rng.uniform(*params.scale_range)
        try:
            draft = builder(rng, params, scale)
            target_center = draft.target.center
            meta = {
                "archetype": params.archetype,
                "seed": int(seed),
                "scale": float(scale),
                "interior_width": float(draft.interior[0]),
                "opening": list(draft.opening),
                "rim_offset": float(draft.rim - target_center @ np.asarray(draft.opening)),
            }
            scene = Scene(tuple(draft.solids), Bounds.cube(target_center, params.cube_size), meta)
            geometry = GridGeometry.covering(scene.bounds, params.spacing)
            demo = synthesize_demonstration(scene, rng, geometry, draft.opening, draft.rim)
        except GenerationFailure as failure:
            logger.info("Seed %s attempt %d rejected: %s", seed, attempt, failure.detail)
            continue
        return scene, demo
    raise GenerationFailure(ErrorMessages.GENERATION_EXHAUSTED.format(attempts=params.max_attempts, seed=seed))
