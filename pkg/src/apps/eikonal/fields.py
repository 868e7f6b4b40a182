"""The target, obstacle and time-of-arrival fields of a scene."""

import logging
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial import cKDTree

from src.apps.common.exceptions import FieldConstructionFailure
from src.apps.scene.constants import GridConfig
from src.apps.scene.grids import Bounds, GridGeometry, ScalarGrid3
from src.apps.scene.serializers import read_fields, write_fields
from src.apps.scene.solids import contains, unsigned_distance
from src.apps.scene.voxels import occupancy_mask

from .constants import ErrorMessages, FieldConfig
from .fmm import SpeedField, fmm_solve


logger = logging.getLogger(__name__)


def object_centric_geometry(scene, h=GridConfig.SPACING, size=GridConfig.CUBE_SIZE):
    """
    Cube of edge ``size`` centered on the target, axis-aligned with the
    scene frame.
    """
    return GridGeometry.covering(Bounds.cube(scene.target.center, size), h)


def invert_clipped(values, floor):
    """
    ``1 / max(values, floor)`` with ``+inf`` mapped to 0.
    """
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        inverted = 1.0 / np.maximum(values, floor)
    inverted[~np.isfinite(values)] = 0.0
    return inverted


def _nearest_cell(geometry, candidates, point):
    """
    Index of the candidate cell whose center is nearest ``point``; ties
    go to the lowest x-fastest cell index.
    """
    indices = np.argwhere(candidates)
    if len(indices) == 0:
        return None
    centers = geometry.cell_center(indices)
    distances = np.linalg.norm(centers - point, axis=1)
    nx, ny, _ = geometry.dims
    flat = indices[:, 0] + nx * (indices[:, 1] + ny * indices[:, 2])
    best = np.lexsort((flat, distances))[0]
    return tuple(int(v) for v in indices[best])


def target_sources(scene, geometry, occupied):
    """
    Free cells within one voxel of the target surface, each seeded with
    its exact distance. Falls back to the free cell nearest the target.
    """
    centers = geometry.cell_centers().reshape(-1, 3)
    exact = unsigned_distance(centers, [scene.target]).reshape(geometry.dims)
    seeds = ~occupied & (exact <= geometry.spacing)
    if not seeds.any():
        nearest = _nearest_cell(geometry, ~occupied, scene.target.center)
        seeds = np.zeros(geometry.dims, dtype=bool)
        if nearest is not None:
            seeds[nearest] = True
    return [(tuple(index), exact[tuple(index)]) for index in np.argwhere(seeds)]


def target_distance(scene, geometry):
    """
    Geodesic distance from the target surface with every solid impassable.
    """
    occupied = occupancy_mask(scene.solids, geometry)
    sources = target_sources(scene, geometry, occupied)
    speed = SpeedField(ScalarGrid3(geometry, np.where(occupied, 0.0, 1.0)))
    if not sources:
        return ScalarGrid3.filled(geometry, np.inf)
    return fmm_solve(speed, sources)


def build_target_field(scene, geometry, epsilon=FieldConfig.EPSILON):
    arrival = target_distance(scene, geometry)
    return ScalarGrid3(geometry, invert_clipped(arrival.values, epsilon), arrival.notes)


def build_obstacle_field(scene, geometry, epsilon=FieldConfig.EPSILON):
    obstacles = scene.obstacles
    if not obstacles:
        return ScalarGrid3.filled(geometry, 0.0)
    centers = geometry.cell_centers().reshape(-1, 3)
    distance = unsigned_distance(centers, obstacles).reshape(geometry.dims)
    return ScalarGrid3(geometry, invert_clipped(distance, epsilon))


def demonstration_speed(demo, geometry, sigma=FieldConfig.SIGMA):
    """
    Peak-normalized Gaussian tube around the demonstration:
    ``|v(x_n)| * exp(-d^2 / 2 sigma^2)`` with ``x_n`` the nearest sample.
    """
    if not sigma > 0.0:
        raise ValidationError(ErrorMessages.BAD_SIGMA)
    positions = demo.positions
    if len(positions) == 0:
        raise ValidationError(ErrorMessages.EMPTY_DEMO)
    centers = geometry.cell_centers().reshape(-1, 3)
    tree = cKDTree(positions)
    if len(positions) == 1:
        distance, nearest = tree.query(centers)
    else:
        distances, indices = tree.query(centers, k=2)
        distance = distances[:, 0]
        tied = distances[:, 1] == distances[:, 0]
        nearest = np.where(tied, indices.min(axis=1), indices[:, 0])
    speed = demo.speeds[nearest] * np.exp(-distance ** 2 / (2.0 * sigma ** 2))
    return speed.reshape(geometry.dims)


def toa_arrival(scene, demo, geometry, sigma=FieldConfig.SIGMA):
    """
    Travel time to the demonstration contact point through the Gaussian
    speed tube, solids impassable. Returns ``(phi, goal_cell)``.
    """
    inside = np.zeros(len(demo.positions), dtype=bool)
    for solid in scene.solids:
        inside |= np.atleast_1d(contains(demo.positions, solid))
    if inside.all():
        raise FieldConstructionFailure(ErrorMessages.DEMO_INSIDE)

    occupied = occupancy_mask(scene.solids, geometry)
    speed = demonstration_speed(demo, geometry, sigma)
    speed[occupied] = 0.0
    passable = speed > 0.0
    goal = demo.positions[demo.contact_index]
    goal_cell = _nearest_cell(geometry, passable, goal)
    if goal_cell is None:
        raise FieldConstructionFailure("No passable cell for the demonstration goal.")
    phi = fmm_solve(SpeedField(ScalarGrid3(geometry, speed)), [(goal_cell, 0.0)])
    logger.debug("Time-of-arrival goal cell %s, finite cells %d", goal_cell, int(phi.finite_mask.sum()))
    return phi, goal_cell


def build_toa_field(scene, demo, geometry, sigma=FieldConfig.SIGMA, epsilon_t=FieldConfig.EPSILON_T):
    phi, _ = toa_arrival(scene, demo, geometry, sigma)
    return ScalarGrid3(geometry, invert_clipped(phi.values, epsilon_t), phi.notes)


def arrival_from_toa(d_toa, horizon=FieldConfig.ARRIVAL_HORIZON):
    """
    Recover arrival times from an inverted field. Zero entries and
    arrivals beyond ``horizon`` seconds are unreached (``+inf``).
    """
    values = np.asarray(d_toa.values, dtype=float)
    with np.errstate(divide="ignore"):
        phi = np.where(values > 0.0, 1.0 / np.where(values > 0.0, values, 1.0), np.inf)
    if horizon is not None:
        phi[phi > horizon] = np.inf
    return ScalarGrid3(d_toa.geometry, phi)


@dataclass(frozen=True)
class FieldTriple:
    d_t: ScalarGrid3
    d_o: ScalarGrid3
    d_toa: ScalarGrid3

    def __post_init__(self):
        if not (self.d_t.geometry == self.d_o.geometry == self.d_toa.geometry):
            raise ValidationError(ErrorMessages.GEOMETRY_MISMATCH)

    @property
    def geometry(self):
        return self.d_t.geometry

    def channels(self):
        return [self.d_t, self.d_o, self.d_toa]

    def stacked(self):
        """
        Per-cell channel vectors, shape ``dims + (3,)``.
        """
        return np.stack([c.values for c in self.channels()], axis=-1)

    @classmethod
    def from_stacked(cls, geometry, values):
        return cls(*(ScalarGrid3(geometry, values[..., c]) for c in range(3)))

    def write(self, path, digest=None):
        return write_fields(path, self.channels(), digest)

    @classmethod
    def read(cls, path):
        channels, digest = read_fields(path)
        if len(channels) != 3:
            raise ValidationError(f"Expected 3 field channels, found {len(channels)}.")
        return cls(*channels), digest


def build_fields(scene, demo, geometry=None, sigma=FieldConfig.SIGMA, epsilon=FieldConfig.EPSILON,
                 epsilon_t=FieldConfig.EPSILON_T):
    geometry = geometry or object_centric_geometry(scene)
    return FieldTriple(
        build_target_field(scene, geometry, epsilon),
        build_obstacle_field(scene, geometry, epsilon),
        build_toa_field(scene, demo, geometry, sigma, epsilon_t),
    )
