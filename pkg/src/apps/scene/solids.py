"""Posed primitive solids, scenes and exact distance queries."""

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial.transform import Rotation

from src.apps.common.rotations import quat_to_matrix, matrix_to_quat

from .constants import (
    ARTICULATED_ROLES,
    SHAPE_DIMENSIONS,
    ErrorMessages,
    JointKind,
    Role,
    Shape,
    SolidTolerance,
)
from .grids import Bounds


@dataclass(frozen=True)
class Articulation:
    """
    Joint of a door or drawer. ``value`` is the current joint position
    (radians for hinges, meters for prismatic joints); the solid pose is
    the one at ``value``. ``pivot`` is a point on the hinge axis.
    """
    axis: tuple
    kind: str
    range: tuple
    value: float = None
    pivot: tuple = None

    def __post_init__(self):
        axis = tuple(float(v) for v in self.axis)
        lo, hi = (float(v) for v in self.range)
        value = lo if self.value is None else float(self.value)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "range", (lo, hi))
        object.__setattr__(self, "value", value)
        if self.pivot is not None:
            object.__setattr__(self, "pivot", tuple(float(v) for v in self.pivot))
        if self.kind not in JointKind.values:
            raise ValidationError(f"Unknown articulation kind {self.kind}.")

    @property
    def is_closed(self):
        return abs(self.value - self.range[0]) <= 1e-9

    def to_dict(self):
        data = {
            "axis": list(self.axis),
            "kind": self.kind,
            "range": list(self.range),
            "value": self.value,
        }
        if self.pivot is not None:
            data["pivot"] = list(self.pivot)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            axis=tuple(data["axis"]),
            kind=data["kind"],
            range=tuple(data["range"]),
            value=data.get("value"),
            pivot=tuple(data["pivot"]) if "pivot" in data else None,
        )


@dataclass(frozen=True)
class Solid:
    id: str
    shape: str
    position: tuple
    quaternion: tuple
    dims: tuple
    role: str
    articulation: Articulation = None

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "quaternion", tuple(float(v) for v in self.quaternion))
        object.__setattr__(self, "dims", tuple(float(v) for v in self.dims))
        self.validate()

    def validate(self):
        if self.shape not in Shape.values:
            raise ValidationError(f"Solid {self.id}: unknown shape {self.shape}.")
        if self.role not in Role.values:
            raise ValidationError(f"Solid {self.id}: unknown role {self.role}.")
        if len(self.position) != 3 or len(self.quaternion) != 4:
            raise ValidationError(f"Solid {self.id}: pose needs 3 coordinates and 4 quaternion terms.")
        if abs(np.linalg.norm(self.quaternion) - 1.0) > SolidTolerance.QUATERNION_NORM:
            raise ValidationError(ErrorMessages.QUATERNION_NOT_UNIT.format(id=self.id))
        expected = SHAPE_DIMENSIONS[self.shape]
        if len(self.dims) != expected:
            raise ValidationError(
                ErrorMessages.WRONG_DIMENSION_COUNT.format(id=self.id, shape=self.shape, count=expected)
            )
        if not all(v > 0.0 and np.isfinite(v) for v in self.dims):
            raise ValidationError(ErrorMessages.EXTENTS_NOT_POSITIVE.format(id=self.id))
        if self.shape == Shape.BOX and not np.allclose(self.rotation, np.eye(3), atol=1e-9):
            raise ValidationError(ErrorMessages.AXIS_ALIGNED_ROTATED.format(id=self.id))
        if self.articulation is not None:
            if self.role not in ARTICULATED_ROLES:
                raise ValidationError(ErrorMessages.ARTICULATION_ROLE.format(id=self.id))
            lo, hi = self.articulation.range
            if not lo <= self.articulation.value <= hi:
                raise ValidationError(ErrorMessages.ARTICULATION_RANGE.format(id=self.id))
            if abs(np.linalg.norm(self.articulation.axis) - 1.0) > SolidTolerance.ARTICULATION_AXIS_NORM:
                raise ValidationError(ErrorMessages.ARTICULATION_AXIS.format(id=self.id))

    @cached_property
    def rotation(self):
        return quat_to_matrix(self.quaternion)

    @property
    def center(self):
        return np.asarray(self.position)

    @property
    def bounding_radius(self):
        if self.shape == Shape.SPHERE:
            return self.dims[0]
        if self.shape == Shape.CYLINDER:
            return float(np.hypot(self.dims[0], 0.5 * self.dims[1]))
        return 0.5 * float(np.linalg.norm(self.dims))

    def aabb(self):
        """
        Axis-aligned bounding box of the posed solid.
        """
        if self.shape == Shape.SPHERE:
            half = np.full(3, self.dims[0])
        elif self.shape == Shape.CYLINDER:
            radius, height = self.dims
            axis = self.rotation[:, 2]
            half = radius * np.sqrt(np.clip(1.0 - axis ** 2, 0.0, 1.0)) + 0.5 * height * np.abs(axis)
        else:
            half = np.abs(self.rotation) @ (0.5 * np.asarray(self.dims))
        return Bounds(tuple(self.center - half), tuple(self.center + half))

    def to_local(self, points):
        return (np.atleast_2d(points) - self.center) @ self.rotation

    def to_world(self, points):
        return np.atleast_2d(points) @ self.rotation.T + self.center

    def moved(self, rotation, translation):
        """
        Solid after applying the rigid motion ``x -> rotation @ x + translation``.
        """
        new_rotation = rotation @ self.rotation
        shape = self.shape
        if shape == Shape.BOX and not np.allclose(new_rotation, np.eye(3), atol=1e-9):
            shape = Shape.ORIENTED_BOX
        return replace(
            self,
            shape=shape,
            position=tuple(rotation @ self.center + translation),
            quaternion=tuple(matrix_to_quat(new_rotation)),
        )

    def at_articulation(self, value):
        """
        Door or drawer moved to joint position ``value``.
        """
        joint = self.articulation
        lo, hi = joint.range
        value = float(np.clip(value, lo, hi))
        delta = value - joint.value
        axis = np.asarray(joint.axis)
        if joint.kind == JointKind.HINGE:
            rotation = Rotation.from_rotvec(delta * axis).as_matrix()
            pivot = np.asarray(joint.pivot if joint.pivot is not None else self.position)
            translation = pivot - rotation @ pivot
        else:
            rotation = np.eye(3)
            translation = delta * axis
        moved = self.moved(rotation, translation)
        return replace(moved, articulation=replace(joint, value=value))

    def to_dict(self):
        data = {
            "id": self.id,
            "shape": self.shape,
            "pose": {"pos": list(self.position), "quat": list(self.quaternion)},
            "dims": list(self.dims),
            "role": self.role,
        }
        if self.articulation is not None:
            data["articulation"] = self.articulation.to_dict()
        return data

    @classmethod
    def from_dict(cls, data):
        articulation = data.get("articulation")
        return cls(
            id=str(data["id"]),
            shape=data["shape"],
            position=tuple(data["pose"]["pos"]),
            quaternion=tuple(data["pose"]["quat"]),
            dims=tuple(data["dims"]),
            role=data["role"],
            articulation=Articulation.from_dict(articulation) if articulation else None,
        )


def _box_signed_distance(local, half):
    q = np.abs(local) - half
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = np.minimum(np.max(q, axis=1), 0.0)
    return outside + inside


def _cylinder_signed_distance(local, radius, half_height):
    radial = np.linalg.norm(local[:, :2], axis=1) - radius
    axial = np.abs(local[:, 2]) - half_height
    q = np.stack([radial, axial], axis=1)
    return np.minimum(np.max(q, axis=1), 0.0) + np.linalg.norm(np.maximum(q, 0.0), axis=1)


def signed_distance(points, solid):
    """
    Exact signed distance from each point to the surface of ``solid``
    (negative inside). Accepts a single point or an ``(n, 3)`` array.
    """
    single = np.ndim(points) == 1
    local = solid.to_local(points)
    if solid.shape == Shape.SPHERE:
        result = np.linalg.norm(local, axis=1) - solid.dims[0]
    elif solid.shape == Shape.CYLINDER:
        result = _cylinder_signed_distance(local, solid.dims[0], 0.5 * solid.dims[1])
    else:
        result = _box_signed_distance(local, 0.5 * np.asarray(solid.dims))
    return float(result[0]) if single else result


def _box_closest(local, half):
    outside = np.clip(local, -half, half)
    gaps = half - np.abs(local)
    is_inside = np.all(gaps >= 0.0, axis=1)
    result = outside.copy()
    if np.any(is_inside):
        rows = np.nonzero(is_inside)[0]
        axis = np.argmin(gaps[rows], axis=1)
        sign = np.where(local[rows, axis] >= 0.0, 1.0, -1.0)
        result[rows, axis] = sign * half[axis]
    return result


def _cylinder_closest(local, radius, half_height):
    radial = np.linalg.norm(local[:, :2], axis=1)
    direction = np.zeros((len(local), 2))
    nonzero = radial > 0.0
    direction[nonzero] = local[nonzero, :2] / radial[nonzero, None]
    direction[~nonzero] = (1.0, 0.0)

    result = local.copy()
    outside = (radial > radius) | (np.abs(local[:, 2]) > half_height)
    clamped_radial = np.minimum(radial, radius)
    result[outside, :2] = direction[outside] * clamped_radial[outside, None]
    result[outside, 2] = np.clip(local[outside, 2], -half_height, half_height)

    inside = ~outside
    side_gap = radius - radial
    cap_gap = half_height - np.abs(local[:, 2])
    to_side = inside & (side_gap <= cap_gap)
    to_cap = inside & ~to_side
    result[to_side, :2] = direction[to_side] * radius
    result[to_cap, 2] = np.where(local[to_cap, 2] >= 0.0, half_height, -half_height)
    return result


def closest_surface_point(points, solid):
    """
    Nearest point on the surface of ``solid`` for each query point.
    """
    single = np.ndim(points) == 1
    local = solid.to_local(points)
    if solid.shape == Shape.SPHERE:
        norms = np.linalg.norm(local, axis=1)
        direction = np.zeros_like(local)
        direction[norms > 0.0] = local[norms > 0.0] / norms[norms > 0.0, None]
        direction[norms == 0.0] = (1.0, 0.0, 0.0)
        surface = direction * solid.dims[0]
    elif solid.shape == Shape.CYLINDER:
        surface = _cylinder_closest(local, solid.dims[0], 0.5 * solid.dims[1])
    else:
        surface = _box_closest(local, 0.5 * np.asarray(solid.dims))
    world = solid.to_world(surface)
    return world[0] if single else world


def contains(points, solid):
    """
    Insideness; points exactly on the surface count as inside.
    """
    result = np.atleast_1d(signed_distance(np.atleast_2d(points), solid)) <= 0.0
    return bool(result[0]) if np.ndim(points) == 1 else result


def unsigned_distance(points, solids):
    """
    Minimum exterior distance to any solid; points inside a solid return 0.
    """
    solids = list(solids)
    if not solids:
        raise ValidationError(ErrorMessages.NO_SOLIDS)
    single = np.ndim(points) == 1
    points = np.atleast_2d(points)
    result = np.full(len(points), np.inf)
    for solid in solids:
        np.minimum(result, np.maximum(signed_distance(points, solid), 0.0), out=result)
    return float(result[0]) if single else result


def scene_signed_distance(points, solids):
    """
    Signed distance to the union of ``solids``; negative values give the
    deepest penetration among the solids containing the point.
    """
    single = np.ndim(points) == 1
    points = np.atleast_2d(points)
    result = np.full(len(points), np.inf)
    for solid in solids:
        np.minimum(result, signed_distance(points, solid), out=result)
    return float(result[0]) if single else result


def nearest_solid(points, solids):
    """
    Index into ``solids`` of the closest solid for each point.
    """
    points = np.atleast_2d(points)
    distances = np.stack([signed_distance(points, solid) for solid in solids], axis=1)
    return np.argmin(distances, axis=1)


def gradient_of_distance(point, solids, step=SolidTolerance.GRADIENT_STEP):
    """
    Unit direction of steepest increase of the scene signed distance at
    ``point`` by central differences.
    """
    point = np.asarray(point, dtype=float)
    offsets = np.vstack([np.eye(3) * step, -np.eye(3) * step])
    samples = scene_signed_distance(point + offsets, solids)
    gradient = (samples[:3] - samples[3:]) / (2.0 * step)
    norm = np.linalg.norm(gradient)
    if norm == 0.0:
        return np.zeros(3)
    return gradient / norm


@dataclass(frozen=True)
class Scene:
    solids: tuple
    bounds: Bounds
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "solids", tuple(self.solids))
        targets = [s for s in self.solids if s.role == Role.TARGET]
        if len(targets) != 1:
            raise ValidationError(ErrorMessages.TARGET_COUNT.format(count=len(targets)))
        seen = set()
        for solid in self.solids:
            if solid.id in seen:
                raise ValidationError(ErrorMessages.DUPLICATE_ID.format(id=solid.id))
            seen.add(solid.id)

    @property
    def target(self):
        return next(s for s in self.solids if s.role == Role.TARGET)

    @property
    def obstacles(self):
        """
        Every solid other than the target.
        """
        return tuple(s for s in self.solids if s.role != Role.TARGET)

    def solid(self, solid_id):
        for solid in self.solids:
            if solid.id == solid_id:
                return solid
        raise ValidationError(ErrorMessages.UNKNOWN_SOLID.format(id=solid_id))

    def others(self, solid_id):
        return tuple(s for s in self.solids if s.id != solid_id)

    def replacing(self, solid):
        """
        Scene with the solid of the same id swapped for ``solid``.
        """
        self.solid(solid.id)
        solids = tuple(solid if s.id == solid.id else s for s in self.solids)
        return replace(self, solids=solids)

    def without(self, solid_id):
        self.solid(solid_id)
        return replace(self, solids=self.others(solid_id))

    def retargeted(self, solid_id):
        """
        Scene where ``solid_id`` becomes the target and the former target
        an obstacle.
        """
        solids = []
        for solid in self.solids:
            if solid.id == solid_id:
                solids.append(replace(solid, role=Role.TARGET, articulation=None))
            elif solid.role == Role.TARGET:
                solids.append(replace(solid, role=Role.OBSTACLE))
            else:
                solids.append(solid)
        self.solid(solid_id)
        return replace(self, solids=tuple(solids))

    def translated(self, offset):
        offset = np.asarray(offset, dtype=float)
        moved = []
        for solid in self.solids:
            solid = replace(solid, position=tuple(solid.center + offset))
            joint = solid.articulation
            if joint is not None and joint.pivot is not None:
                solid = replace(solid, articulation=replace(joint, pivot=tuple(np.asarray(joint.pivot) + offset)))
            moved.append(solid)
        return replace(self, solids=tuple(moved), bounds=self.bounds.translated(offset))

    def closed_articulations(self):
        return tuple(
            s for s in self.solids
            if s.articulation is not None and s.articulation.is_closed
        )

    def opening_direction(self, solid_id=None):
        """
        Axis direction along which a ray from the object leaves the
        container without crossing a fixed shell. Doors and drawers are
        ignored since they can be opened. Order of preference: +x, -x,
        +y, -y, +z, -z.
        """
        origin = (self.solid(solid_id) if solid_id else self.target).center
        shells = [s for s in self.solids if s.role == Role.CONTAINER_SHELL]
        directions = np.vstack([np.eye(3), -np.eye(3)])[[0, 3, 1, 4, 2, 5]]
        if not shells:
            return directions[0]
        lo = np.min([s.aabb().lo for s in shells], axis=0)
        hi = np.max([s.aabb().hi for s in shells], axis=0)
        reach = float(np.linalg.norm(hi - lo)) + 0.1
        steps = np.arange(0.0, reach, 0.01)[1:]
        for direction in directions:
            samples = origin + steps[:, None] * direction
            blocked = np.zeros(len(samples), dtype=bool)
            for shell in shells:
                blocked |= contains(samples, shell)
            if not blocked.any():
                return direction
        return directions[0]

    def to_dict(self):
        data = {
            "bounds": self.bounds.to_dict(),
            "solids": [solid.to_dict() for solid in self.solids],
        }
        if self.meta:
            data["meta"] = dict(self.meta)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            solids=tuple(Solid.from_dict(item) for item in data["solids"]),
            bounds=Bounds.from_dict(data["bounds"]),
            meta=dict(data.get("meta", {})),
        )
