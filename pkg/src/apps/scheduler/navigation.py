"""2D navigation: occupancy slicing, cost-field planning and segment matching."""

import json
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from scipy.ndimage import map_coordinates
from scipy.spatial import cKDTree

from src.apps.common.artifacts import atomic_write_json
from src.apps.common.exceptions import NavigationFailure
from src.apps.common.rotations import yaw_rotation
from src.apps.eikonal.fmm import march
from src.apps.scene.solids import scene_signed_distance, unsigned_distance

from .constants import BodyConfig, ErrorMessages, GoalJoint, NavigationConfig
from .goals import goal_set_from_dict, goal_set_to_dict, standing_goals


logger = logging.getLogger(__name__)

FEATURE_SIZE = 33
FEATURE_JOINTS = (GoalJoint.LEFT_HAND, GoalJoint.RIGHT_HAND, GoalJoint.HIP)
NEIGHBORS_8 = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]


@dataclass(frozen=True)
class OccupancyGrid2:
    """
    Cell-centered 2D grid over the ground plane; ``occupied`` has shape
    ``(nx, ny)``.
    """
    origin: tuple
    spacing: float
    occupied: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "occupied", np.asarray(self.occupied, dtype=bool))

    @property
    def dims(self):
        return self.occupied.shape

    def cell_centers(self):
        xs = self.origin[0] + (np.arange(self.dims[0]) + 0.5) * self.spacing
        ys = self.origin[1] + (np.arange(self.dims[1]) + 0.5) * self.spacing
        return np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)

    def cell_center(self, cell):
        return np.asarray(self.origin) + (np.asarray(cell, dtype=float) + 0.5) * self.spacing

    def fractional_index(self, point):
        return (np.asarray(point, dtype=float)[:2] - np.asarray(self.origin)) / self.spacing - 0.5

    def cell_of(self, point):
        """
        Cell containing ``point``, or ``None`` outside the grid.
        """
        index = np.floor((np.asarray(point, dtype=float)[:2] - np.asarray(self.origin)) / self.spacing).astype(int)
        if np.any(index < 0) or np.any(index >= np.asarray(self.dims)):
            return None
        return tuple(int(i) for i in index)

    def is_free(self, point):
        cell = self.cell_of(point)
        return cell is not None and not self.occupied[cell]


def occupancy_from_scene(scene, spacing=NavigationConfig.SPACING, band=NavigationConfig.BAND,
                         inflation=NavigationConfig.INFLATION, margin=NavigationConfig.MARGIN):
    """
    Ground grid around the scene marking every cell within ``inflation``
    of a solid that reaches into the height ``band``.
    """
    lo = np.asarray(scene.bounds.lo[:2]) - margin
    hi = np.asarray(scene.bounds.hi[:2]) + margin
    dims = np.maximum(np.ceil((hi - lo) / spacing).astype(int), 1)
    grid = OccupancyGrid2(tuple(lo), spacing, np.zeros(tuple(dims), dtype=bool))
    centers = grid.cell_centers().reshape(-1, 2)
    occupied = np.zeros(len(centers), dtype=bool)
    for solid in scene.solids:
        box = solid.aabb()
        bottom, top = max(box.lo[2], band[0]), min(box.hi[2], band[1])
        if bottom > top:
            continue
        height = float(np.clip(solid.center[2], bottom, top))
        points = np.column_stack([centers, np.full(len(centers), height)])
        occupied |= unsigned_distance(points, [solid]) <= inflation
    return OccupancyGrid2(grid.origin, spacing, occupied.reshape(grid.dims))


def unsigned_angle(first, second):
    """
    Angle in ``[0, pi]`` between 2D vectors, rowwise.
    """
    first = np.atleast_2d(first)
    second = np.broadcast_to(np.asarray(second, dtype=float), first.shape)
    cross = first[:, 0] * second[:, 1] - first[:, 1] * second[:, 0]
    dot = np.sum(first * second, axis=1)
    return np.arctan2(np.abs(cross), dot)


def cost_field(grid, goal_position, goal_heading, radius=NavigationConfig.GOAL_RADIUS):
    """
    Per-cell traversal cost: ``+inf`` when occupied, 1 in general, and
    ``angle(p_g - p, d_g) / pi + 0.5`` within L1 distance ``radius`` of
    the goal, so cells the character passes when arriving along the goal
    heading cost 0.5 and cells beyond the goal 1.5.
    """
    heading = np.asarray(goal_heading, dtype=float)[:2]
    if not np.linalg.norm(heading) > 0.0:
        raise ValidationError(ErrorMessages.BAD_HEADING)
    centers = grid.cell_centers().reshape(-1, 2)
    offset = np.asarray(goal_position, dtype=float)[:2] - centers
    cost = np.ones(len(centers))
    near = np.sum(np.abs(offset), axis=1) < radius
    cost[near] = unsigned_angle(offset[near], heading) / np.pi + 0.5
    cost = cost.reshape(grid.dims)
    cost[grid.occupied] = np.inf
    return cost


def path_cost(cost, grid, points):
    """
    Cost integral of a polyline, each piece weighted by the cost of the
    cell holding its midpoint.
    """
    points = np.asarray(points, dtype=float)
    total = 0.0
    for start, end in zip(points[:-1], points[1:]):
        cell = grid.cell_of(0.5 * (start + end))
        weight = cost[cell] if cell is not None else np.inf
        total += float(np.linalg.norm(end - start)) * weight
    return total


@dataclass(frozen=True)
class NavPath:
    points: np.ndarray
    cost: float
    notes: tuple = field(default=())

    @property
    def length(self):
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))


def _require_free(grid, point, message):
    cell = grid.cell_of(point)
    if cell is None:
        raise NavigationFailure(ErrorMessages.OUTSIDE_GRID.format(point=np.round(point, 3).tolist()))
    if grid.occupied[cell]:
        raise NavigationFailure(message.format(cell=cell))
    return cell


def _descend_neighbor(arrival, cell):
    best, best_value = None, arrival[cell]
    for di, dj in NEIGHBORS_8:
        neighbor = (cell[0] + di, cell[1] + dj)
        if not (0 <= neighbor[0] < arrival.shape[0] and 0 <= neighbor[1] < arrival.shape[1]):
            continue
        if arrival[neighbor] < best_value:
            best, best_value = neighbor, arrival[neighbor]
    return best


def plan_2d_path(grid, start, goal_position, goal_heading, radius=NavigationConfig.GOAL_RADIUS,
                 step_fraction=NavigationConfig.STEP_FRACTION):
    """
    Minimal cost-integral path from ``start`` to ``goal_position`` by fast
    marching over the cost field and gradient backtracing. Where the
    interpolated gradient does not descend, the path steps to the lowest
    neighboring cell instead. The last point is the goal itself.
    """
    start = np.asarray(start, dtype=float)[:2]
    goal = np.asarray(goal_position, dtype=float)[:2]
    cost = cost_field(grid, goal, goal_heading, radius)
    _require_free(grid, start, ErrorMessages.START_BLOCKED)
    goal_cell = _require_free(grid, goal, ErrorMessages.GOAL_BLOCKED)

    with np.errstate(divide="ignore"):
        speed = np.where(np.isfinite(cost), 1.0 / cost, 0.0)
    arrival, _ = march(speed, grid.spacing, [(goal_cell, 0.0)])
    start_cell = grid.cell_of(start)
    if not np.isfinite(arrival[start_cell]):
        raise NavigationFailure(ErrorMessages.UNREACHABLE.format(start=np.round(start, 3).tolist()))

    finite = np.isfinite(arrival)
    filled = np.where(finite, arrival, arrival[finite].max() + grid.spacing * 10.0)
    gradient = np.gradient(filled, grid.spacing)
    step = step_fraction * grid.spacing
    limit = NavigationConfig.MAX_STEPS_FACTOR * arrival.size

    def sample(values, point):
        return float(map_coordinates(values, grid.fractional_index(point)[:, None], order=1, mode="nearest")[0])

    points = [start]
    point = start
    notes = []
    fallbacks = 0
    for _ in range(limit):
        if np.linalg.norm(point - goal) <= grid.spacing:
            break
        direction = np.array([sample(gradient[0], point), sample(gradient[1], point)])
        norm = np.linalg.norm(direction)
        moved = None
        if np.isfinite(norm) and norm > 1e-12:
            candidate = point - step * direction / norm
            if grid.is_free(candidate) and sample(filled, candidate) < sample(filled, point):
                moved = candidate
        if moved is None:
            neighbor = _descend_neighbor(arrival, grid.cell_of(point))
            if neighbor is None:
                moved = grid.cell_center(goal_cell) if grid.cell_of(point) == goal_cell else None
                if moved is None:
                    raise NavigationFailure(ErrorMessages.UNREACHABLE.format(start=np.round(start, 3).tolist()))
            else:
                moved = grid.cell_center(neighbor)
            fallbacks += 1
        point = moved
        points.append(point)
    else:
        raise NavigationFailure(ErrorMessages.UNREACHABLE.format(start=np.round(start, 3).tolist()))

    if fallbacks:
        notes.append(f"{fallbacks} steps fell back to neighbor descent")
    points.append(goal)
    points = np.array(points)
    logger.debug("2D path with %d points, %d fallbacks", len(points), fallbacks)
    return NavPath(points, path_cost(cost, grid, points), tuple(notes))


def bfs_path(grid, start, goal):
    """
    Breadth-first 8-connected path over free cells, as cell centers
    between the exact endpoints.
    """
    start_cell = _require_free(grid, start, ErrorMessages.START_BLOCKED)
    goal_cell = _require_free(grid, goal, ErrorMessages.GOAL_BLOCKED)
    previous = {start_cell: None}
    queue = deque([start_cell])
    while queue:
        cell = queue.popleft()
        if cell == goal_cell:
            break
        for di, dj in NEIGHBORS_8:
            neighbor = (cell[0] + di, cell[1] + dj)
            if neighbor in previous:
                continue
            if not (0 <= neighbor[0] < grid.dims[0] and 0 <= neighbor[1] < grid.dims[1]):
                continue
            if grid.occupied[neighbor]:
                continue
            previous[neighbor] = cell
            queue.append(neighbor)
    if goal_cell not in previous:
        raise NavigationFailure(ErrorMessages.UNREACHABLE.format(start=np.round(start, 3).tolist()))
    cells = []
    cell = goal_cell
    while cell is not None:
        cells.append(cell)
        cell = previous[cell]
    centers = [grid.cell_center(c) for c in reversed(cells)]
    return np.array([np.asarray(start, dtype=float)[:2]] + centers[1:-1] + [np.asarray(goal, dtype=float)[:2]])


def split_path(points, length=NavigationConfig.SEGMENT_LENGTH):
    """
    Consecutive pieces of at most ``length`` meters; piece boundaries are
    interpolated onto the polyline.
    """
    points = np.asarray(points, dtype=float)
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(steps)])
    total = arc[-1]
    if total == 0.0:
        return [points[:1]]
    cuts = np.append(np.arange(0.0, total, length), total)
    if total - cuts[-2] < 1e-9:
        cuts = np.delete(cuts, -2)
    segments = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        inside = (arc > lo) & (arc < hi)
        segment = np.vstack([point_at(points, arc, lo), points[inside], point_at(points, arc, hi)])
        segments.append(segment)
    return segments


def point_at(points, arc, distance):
    return np.array([np.interp(distance, arc, points[:, axis]) for axis in range(points.shape[1])])


def heading_at(points, arc, distance):
    """
    Unit tangent of the polyline piece holding ``distance``.
    """
    index = int(np.clip(np.searchsorted(arc, distance, side="left"), 1, len(points) - 1))
    tangent = points[index] - points[index - 1]
    norm = np.linalg.norm(tangent)
    return tangent / norm if norm > 0.0 else np.array([1.0, 0.0])


@dataclass(frozen=True)
class BodyPose:
    """
    Root position and heading on the ground, root velocity, and the
    keyjoint goals of the current posture.
    """
    root: np.ndarray
    heading: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    goals: tuple = None

    def __post_init__(self):
        heading = np.asarray(self.heading, dtype=float)[:2]
        object.__setattr__(self, "root", np.asarray(self.root, dtype=float)[:2])
        object.__setattr__(self, "heading", heading / np.linalg.norm(heading))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float)[:2])
        if self.goals is None:
            object.__setattr__(self, "goals", standing_goals(self.root, self.heading))

    @property
    def rotation(self):
        return yaw_rotation(self.heading)

    def to_local(self, point):
        return (self.rotation[:2, :2].T @ (np.asarray(point, dtype=float)[:2] - self.root))

    def direction_to_local(self, direction):
        return self.rotation[:2, :2].T @ np.asarray(direction, dtype=float)[:2]

    def local_goals(self):
        rotation = self.rotation
        translation = np.array([self.root[0], self.root[1], 0.0])
        return tuple(
            goal.transformed(rotation.T, -rotation.T @ translation)
            for goal in self.goals
        )

    def to_world(self, goals, time_offset=0.0):
        translation = np.array([self.root[0], self.root[1], 0.0])
        return tuple(
            _shift_time(goal.transformed(self.rotation, translation), time_offset)
            for goal in goals
        )


def _shift_time(goal, offset):
    return replace(goal, time=goal.time + offset)


def navigation_feature(goal_heading, goal_position, joint_goals, velocity):
    """
    33-value feature: goal heading and position, then per keyjoint the
    first two rotation columns and the position, then the root velocity,
    all in the segment-start root frame.
    """
    heading = np.asarray(goal_heading, dtype=float)[:2]
    parts = [heading, np.asarray(goal_position, dtype=float)[:2]]
    by_joint = {goal.joint: goal for goal in joint_goals}
    for joint in FEATURE_JOINTS:
        goal = by_joint[joint]
        parts.append(goal.rotation[:, :2].T.reshape(6))
        parts.append(goal.position)
    parts.append(np.asarray(velocity, dtype=float)[:2])
    feature = np.concatenate(parts)
    if feature.size != FEATURE_SIZE or not np.all(np.isfinite(feature)):
        raise ValidationError(ErrorMessages.BAD_FEATURE)
    if abs(np.linalg.norm(heading) - 1.0) > 1e-6:
        raise ValidationError(ErrorMessages.BAD_FEATURE)
    return feature


@dataclass(frozen=True)
class NavEntry:
    """
    A walking segment: its feature and the keyjoint goals it ends in,
    relative to the segment-start root frame.
    """
    feature: np.ndarray
    goals: tuple

    def to_dict(self):
        return {"feature": np.asarray(self.feature).tolist(), "goals": goal_set_to_dict(self.goals)}

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["feature"], dtype=float), goal_set_from_dict(data["goals"]))


class NavigationDatabase:
    def __init__(self, entries):
        self.entries = tuple(entries)
        if not self.entries:
            raise ValidationError(ErrorMessages.EMPTY_DATABASE)
        self.features = np.stack([entry.feature for entry in self.entries])
        self.tree = cKDTree(self.features)

    def __len__(self):
        return len(self.entries)

    def ranked(self, query, k):
        """
        Entry indices by ascending distance to ``query`` (ties by index):
        the ``k`` nearest first, then the rest.
        """
        count = min(int(k), len(self))
        _, nearest = self.tree.query(query, k=count)
        nearest = np.atleast_1d(nearest)
        distances = np.linalg.norm(self.features - query, axis=1)
        head = sorted(nearest.tolist(), key=lambda i: (distances[i], i))
        yield from ((distances[i], i) for i in head)
        seen = set(head)
        rest = [int(i) for i in np.lexsort((np.arange(len(self)), distances)) if int(i) not in seen]
        yield from ((distances[i], i) for i in rest)

    def to_dict(self):
        return {"entries": [entry.to_dict() for entry in self.entries]}

    @classmethod
    def from_dict(cls, data):
        return cls(NavEntry.from_dict(item) for item in data["entries"])


def walking_entry(goal_position, goal_heading, velocity, speed=BodyConfig.WALKING_SPEED):
    start = BodyPose((0.0, 0.0), (1.0, 0.0), velocity)
    distance = float(np.linalg.norm(goal_position))
    goals = standing_goals(goal_position, goal_heading, time=distance / speed)
    feature = navigation_feature(goal_heading, goal_position, start.goals, velocity)
    return NavEntry(feature, goals)


def build_navigation_database(seed, n=NavigationConfig.DATABASE_SIZE, reach=NavigationConfig.SEGMENT_LENGTH):
    """
    Synthetic walking segments from a standing start facing +x: goals
    spread over the forward half disc of radius ``reach`` with headings
    within 45 degrees of the travel direction.
    """
    rng = np.random.default_rng(seed)
    entries = []
    for _ in range(int(n)):
        distance = rng.uniform(0.3, reach)
        bearing = rng.uniform(-0.5 * np.pi, 0.5 * np.pi)
        position = distance * np.array([np.cos(bearing), np.sin(bearing)])
        turn = bearing + rng.uniform(-0.25 * np.pi, 0.25 * np.pi)
        heading = np.array([np.cos(turn), np.sin(turn)])
        velocity = np.array([rng.uniform(0.0, BodyConfig.WALKING_SPEED), 0.0])
        entries.append(walking_entry(position, heading, velocity))
    return NavigationDatabase(entries)


@dataclass
class NavigationMatch:
    segments: list
    goals: list
    deviations: list
    unmatched: list
    entries: list = field(default_factory=list)
    final_pose: BodyPose = None

    @property
    def complete(self):
        return not self.unmatched


def _collision_free(goals, scene):
    if scene is None:
        return True
    positions = np.stack([goal.position for goal in goals if goal.joint != GoalJoint.ROOT])
    return bool(np.all(scene_signed_distance(positions, scene.solids) >= 0.0))


def segment_queries(segment, pose, samples=NavigationConfig.SEGMENT_SAMPLES):
    """
    Query features at ``samples`` positions spread uniformly along a
    segment, farthest first.
    """
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(segment, axis=0), axis=1))])
    local_goals = pose.local_goals()
    velocity = pose.direction_to_local(pose.velocity)
    queries = []
    for j in range(samples, 0, -1):
        distance = arc[-1] * j / samples
        position = pose.to_local(point_at(segment, arc, distance))
        heading = pose.direction_to_local(heading_at(segment, arc, distance))
        queries.append(navigation_feature(heading, position, local_goals, velocity))
    return queries


def best_candidate(db, queries, pose, scene, k=NavigationConfig.CANDIDATES):
    """
    ``(deviation, sample, entry)`` of the closest collision-free
    candidate over all samples, or ``None``.
    """
    best = None
    for sample, query in enumerate(queries):
        for distance, index in db.ranked(query, k):
            if best is not None and (distance, sample, index) >= best:
                break
            if _collision_free(pose.to_world(db.entries[index].goals), scene):
                best = (distance, sample, index)
                break
    return best


def match_navigation(db, path, pose, scene=None, segment_length=NavigationConfig.SEGMENT_LENGTH,
                     samples=NavigationConfig.SEGMENT_SAMPLES, k=NavigationConfig.CANDIDATES):
    """
    Chain walking segments along a 2D path. Each piece of at most
    ``segment_length`` meters takes the database entry with the smallest
    feature distance to any of its sampled goal positions whose goals are
    collision free; pieces without one are listed in ``unmatched`` and
    the character is moved to their end.
    """
    if len(db) == 0:
        raise ValidationError(ErrorMessages.EMPTY_DATABASE)
    segments = split_path(path, segment_length)
    result = NavigationMatch(segments, [], [], [])
    clock = 0.0
    for number, segment in enumerate(segments):
        best = best_candidate(db, segment_queries(segment, pose, samples), pose, scene, k)
        if best is None:
            logger.info("Navigation segment %d has no collision-free candidate", number)
            result.unmatched.append(number)
            arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(segment, axis=0), axis=1))])
            pose = BodyPose(segment[-1], heading_at(segment, arc, arc[-1]))
            continue
        distance, _, index = best
        goals = pose.to_world(db.entries[index].goals, clock)
        clock = max(goal.time for goal in goals)
        result.goals.append(goals)
        result.deviations.append(float(distance))
        result.entries.append(index)
        root = next(goal for goal in goals if goal.joint == GoalJoint.ROOT)
        heading = root.rotation[:2, 0]
        pose = BodyPose(root.position[:2], heading, heading * BodyConfig.WALKING_SPEED)
    result.final_pose = pose
    return result


def write_navigation_database(path, db, run_config=None):
    payload = db.to_dict()
    if run_config is not None:
        payload["run_config"] = run_config.to_dict()
    return atomic_write_json(path, payload)


def read_navigation_database(path):
    return NavigationDatabase.from_dict(json.loads(Path(path).read_text()))
