"""Start selection and gradient-descent path extraction over arrival fields."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from scipy.ndimage import map_coordinates

from src.apps.common.exceptions import Stagnation, UnreachableTarget
from src.apps.eikonal.constants import FieldConfig

from .constants import ErrorMessages, ExtractionConfig


logger = logging.getLogger(__name__)

NEIGHBOR_OFFSETS = np.array([
    (dx, dy, dz)
    for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
])


def select_start(phi, wrist, v_bar=ExtractionConfig.AVERAGE_WALKING_SPEED):
    """
    Cell center minimizing ``-phi(x) + |x - wrist| / v_bar`` over the
    finite cells of ``phi``. Ties go to the cell closer to the wrist, then
    to the lowest x-fastest cell index.
    """
    if not v_bar > 0.0:
        raise ValidationError(ErrorMessages.BAD_SPEED)
    finite = phi.finite_mask
    if not finite.any():
        raise UnreachableTarget(ErrorMessages.NO_FINITE_CELL)

    geometry = phi.geometry
    indices = np.argwhere(finite)
    centers = geometry.cell_center(indices)
    distances = np.linalg.norm(centers - np.asarray(wrist, dtype=float), axis=1)
    cost = -phi.values[tuple(indices.T)] + distances / v_bar
    nx, ny, _ = geometry.dims
    flat = indices[:, 0] + nx * (indices[:, 1] + ny * indices[:, 2])
    best = np.lexsort((flat, distances, cost))[0]
    return centers[best]


@dataclass(frozen=True)
class PlannedPath:
    """
    Positions descending an arrival field, with the speed and the
    interpolated arrival at each sample.
    """
    positions: np.ndarray
    speeds: np.ndarray
    arrivals: np.ndarray
    reached_sink: bool
    notes: tuple = field(default=())

    def __len__(self):
        return len(self.positions)

    @property
    def length(self):
        return float(np.sum(np.linalg.norm(np.diff(self.positions, axis=0), axis=1)))

    def reversed(self):
        return PlannedPath(
            self.positions[::-1].copy(),
            self.speeds[::-1].copy(),
            self.arrivals[::-1].copy(),
            self.reached_sink,
            self.notes,
        )


class ArrivalSampler:
    """
    Trilinear samples of an arrival grid and of its gradient. Infinite
    cells are capped at the largest finite arrival so that they repel.
    """

    def __init__(self, phi):
        self.geometry = phi.geometry
        self.finite = phi.finite_mask
        values = np.array(phi.values)
        cap = values[self.finite].max() if self.finite.any() else 0.0
        values[~self.finite] = cap
        self.values = values
        self.gradients = [
            np.gradient(values, self.geometry.spacing, axis=axis) if values.shape[axis] > 1
            else np.zeros_like(values)
            for axis in range(3)
        ]

    def _sample(self, grid, point):
        coordinates = self.geometry.fractional_index(point).T
        return float(map_coordinates(grid, coordinates, order=1, mode="nearest")[0])

    def arrival(self, point):
        return self._sample(self.values, point)

    def gradient(self, point):
        return np.array([self._sample(g, point) for g in self.gradients])

    def is_free(self, point):
        cell = self.geometry.cell_of(point)
        return cell is not None and bool(self.finite[cell])


def _velocity(gradient, hadamard):
    """
    Unit descent direction and speed magnitude. The default follows the
    Eikonal identity ``speed = 1 / |grad phi|``; ``hadamard`` takes the
    element-wise reciprocal of the gradient instead.
    """
    norm = float(np.linalg.norm(gradient))
    if not hadamard:
        speed = 1.0 / norm
        return -gradient / norm, speed
    velocity = np.zeros(3)
    live = np.abs(gradient) > ExtractionConfig.STAGNATION_GRADIENT
    velocity[live] = np.clip(-1.0 / gradient[live], -ExtractionConfig.MAX_SPEED, ExtractionConfig.MAX_SPEED)
    magnitude = float(np.linalg.norm(velocity))
    return velocity / magnitude, magnitude


def _neighbor_fallback(sampler, point, value):
    """
    Center of the lowest finite neighbor cell below ``value``, or ``None``.
    """
    cell = sampler.geometry.cell_of(point)
    if cell is None:
        return None
    shape = np.asarray(sampler.geometry.dims)
    candidates = np.vstack([[0, 0, 0], NEIGHBOR_OFFSETS]) + np.asarray(cell)
    candidates = candidates[np.all((candidates >= 0) & (candidates < shape), axis=1)]
    candidates = candidates[sampler.finite[tuple(candidates.T)]]
    if len(candidates) == 0:
        return None
    values = sampler.values[tuple(candidates.T)]
    best = int(np.argmin(values))
    center = sampler.geometry.cell_center(candidates[best])
    if values[best] < value or (values[best] <= value and not np.allclose(center, point)):
        return center, float(values[best])
    return None


def integrate_path(phi, start, step=None, epsilon_t=FieldConfig.EPSILON_T, hadamard=False):
    """
    Descend ``phi`` from ``start`` along ``-grad phi`` until the arrival
    drops below ``2 * epsilon_t`` or the step budget of ten grid
    diagonals is spent.

    Each step is at most ``step`` (default half a voxel) and at most the
    linear estimate ``phi / |grad phi|`` of the remaining distance. A step
    that leaves the finite region or fails to descend is halved; after
    eight halvings the path moves to the lowest neighboring cell center.
    """
    geometry = phi.geometry
    step = 0.5 * geometry.spacing if step is None else float(step)
    if not step > 0.0:
        raise ValidationError(ErrorMessages.BAD_STEP)

    sampler = ArrivalSampler(phi)
    point = np.asarray(start, dtype=float)
    if not sampler.is_free(point):
        raise UnreachableTarget(ErrorMessages.START_NOT_FINITE)

    sink = ExtractionConfig.SINK_FACTOR * epsilon_t
    budget = math.ceil(ExtractionConfig.STEP_LIMIT_FACTOR * geometry.diagonal / step)
    value = sampler.arrival(point)
    positions, speeds, arrivals = [point], [], [value]
    notes = []
    fallbacks = 0

    for _ in range(budget):
        if value < sink:
            break
        gradient = sampler.gradient(point)
        norm = float(np.linalg.norm(gradient))
        if norm < ExtractionConfig.STAGNATION_GRADIENT:
            raise Stagnation(
                ErrorMessages.STAGNATION.format(position=np.round(point, 4).tolist()),
                last_position=point,
            )
        direction, speed = _velocity(gradient, hadamard)
        speeds.append(float(np.clip(speed, ExtractionConfig.MIN_SPEED, ExtractionConfig.MAX_SPEED)))

        length = min(step, value / norm)
        moved = None
        for _ in range(ExtractionConfig.MAX_HALVINGS + 1):
            candidate = point + length * direction
            if sampler.is_free(candidate):
                candidate_value = sampler.arrival(candidate)
                if candidate_value < value:
                    moved = candidate, candidate_value
                    break
            length *= 0.5

        if moved is None:
            moved = _neighbor_fallback(sampler, point, value)
            fallbacks += 1
            if moved is None:
                raise Stagnation(
                    ErrorMessages.STAGNATION.format(position=np.round(point, 4).tolist()),
                    last_position=point,
                )
        point, value = moved
        positions.append(point)
        arrivals.append(value)
    else:
        if value >= sink:
            notes.append("step budget exhausted before the sink")

    if fallbacks:
        notes.append(f"{fallbacks} neighbor-cell fallbacks")
        logger.info("Path extraction used %d neighbor-cell fallbacks", fallbacks)

    gradient = sampler.gradient(point)
    norm = float(np.linalg.norm(gradient))
    if norm >= ExtractionConfig.STAGNATION_GRADIENT:
        _, speed = _velocity(gradient, hadamard)
    else:
        speed = ExtractionConfig.MIN_SPEED
    speeds.append(float(np.clip(speed, ExtractionConfig.MIN_SPEED, ExtractionConfig.MAX_SPEED)))

    logger.debug("Extracted %d samples, final arrival %.4f s", len(positions), value)
    return PlannedPath(
        np.array(positions),
        np.array(speeds),
        np.array(arrivals),
        value < sink,
        tuple(notes),
    )
