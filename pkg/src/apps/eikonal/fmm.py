"""First-order upwind fast marching on regular grids of any dimension."""

import heapq
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.scene.grids import ScalarGrid3

from .constants import ErrorMessages, MarchDiagnostics


logger = logging.getLogger(__name__)

FAR, TRIAL, KNOWN = 0, 1, 2


@dataclass(frozen=True)
class SpeedField:
    """
    Propagation speeds in m/s; zero or non-finite speed is impassable.
    """
    grid: ScalarGrid3

    def __post_init__(self):
        values = self.grid.values
        finite = values[np.isfinite(values)]
        if np.any(finite < 0.0):
            raise ValidationError(ErrorMessages.NEGATIVE_SPEED)

    @property
    def geometry(self):
        return self.grid.geometry

    @property
    def passable(self):
        values = self.grid.values
        return np.isfinite(values) & (values > 0.0)


def _solve_local(neighbor_values, rhs):
    """
    Upwind update from the smallest known neighbor value per axis.
    """
    values = sorted(neighbor_values)
    candidate = values[0] + rhs
    total = values[0]
    squares = values[0] * values[0]
    for m in range(2, len(values) + 1):
        if candidate <= values[m - 1]:
            break
        total += values[m - 1]
        squares += values[m - 1] * values[m - 1]
        discriminant = total * total - m * (squares - rhs * rhs)
        if discriminant < 0.0:
            break
        candidate = (total + math.sqrt(discriminant)) / m
    return candidate


def march(speed, spacing, sources):
    """
    Solve ``|grad phi| = 1 / speed`` on an n-dimensional array.

    ``sources`` is an iterable of ``(index_tuple, value)`` Dirichlet
    conditions; duplicates keep the smallest value. Returns
    ``(arrival, diagnostics)`` where impassable or unreached cells hold
    ``+inf``.
    """
    speed = np.asarray(speed, dtype=float)
    shape = speed.shape
    sources = list(sources)
    if not sources:
        raise ValidationError(ErrorMessages.NO_SOURCES)

    passable_array = np.isfinite(speed) & (speed > 0.0)
    size = speed.size
    passable = passable_array.ravel().tolist()
    with np.errstate(divide="ignore"):
        rhs = np.where(passable_array, spacing / np.where(passable_array, speed, 1.0), np.inf).ravel().tolist()
    coords = [c.ravel().tolist() for c in np.indices(shape)]
    strides = [int(s // speed.itemsize) for s in np.empty(shape).strides]
    ndim = len(shape)

    arrival = [math.inf] * size
    state = bytearray(size)
    fixed = bytearray(size)
    heap = []

    for index, value in sources:
        value = float(value)
        if value < 0.0:
            raise ValidationError(ErrorMessages.NEGATIVE_SOURCE)
        flat = int(np.ravel_multi_index(tuple(int(i) for i in index), shape))
        if not passable[flat]:
            continue
        if value < arrival[flat]:
            arrival[flat] = value
            fixed[flat] = 1
            state[flat] = TRIAL
            heapq.heappush(heap, (value, flat))

    if not heap:
        logger.warning("Fast marching: %s", MarchDiagnostics.NO_PASSABLE_SOURCE)
        return np.full(shape, np.inf), [MarchDiagnostics.NO_PASSABLE_SOURCE]

    accepted = 0
    while heap:
        value, flat = heapq.heappop(heap)
        if state[flat] == KNOWN or value > arrival[flat]:
            continue
        state[flat] = KNOWN
        accepted += 1
        for axis in range(ndim):
            coordinate = coords[axis][flat]
            stride = strides[axis]
            for step in (-1, 1):
                moved = coordinate + step
                if moved < 0 or moved >= shape[axis]:
                    continue
                neighbor = flat + step * stride
                if state[neighbor] == KNOWN or fixed[neighbor] or not passable[neighbor]:
                    continue
                updated = _solve_local(_upwind_values(neighbor, coords, strides, shape, arrival, state), rhs[neighbor])
                if updated < arrival[neighbor]:
                    arrival[neighbor] = updated
                    state[neighbor] = TRIAL
                    heapq.heappush(heap, (updated, neighbor))

    logger.debug("Fast marching accepted %d of %d cells", accepted, size)
    return np.asarray(arrival).reshape(shape), []


def _upwind_values(flat, coords, strides, shape, arrival, state):
    values = []
    for axis in range(len(shape)):
        best = math.inf
        coordinate = coords[axis][flat]
        stride = strides[axis]
        if coordinate > 0 and state[flat - stride] == KNOWN:
            best = arrival[flat - stride]
        if coordinate < shape[axis] - 1 and state[flat + stride] == KNOWN:
            best = min(best, arrival[flat + stride])
        if best < math.inf:
            values.append(best)
    return values


def fmm_solve(speed, sources):
    """
    Arrival-time grid for a ``SpeedField`` and ``(cell, value)`` sources.
    A march whose sources are all impassable yields an all-``+inf`` grid
    whose ``notes`` carry the diagnostic.
    """
    arrival, diagnostics = march(speed.grid.values, speed.geometry.spacing, sources)
    return ScalarGrid3(speed.geometry, arrival, tuple(diagnostics))
