"""Occupancy voxelization of scenes."""

import numpy as np

from .grids import GridGeometry, ScalarGrid3
from .solids import contains


def occupancy_mask(solids, geometry):
    """
    Boolean ``geometry.dims`` array marking cell centers inside any of
    ``solids``.
    """
    centers = geometry.cell_centers().reshape(-1, 3)
    mask = np.zeros(len(centers), dtype=bool)
    bounds_lo = centers.min(axis=0)
    bounds_hi = centers.max(axis=0)
    for solid in solids:
        box = solid.aabb()
        if np.any(np.asarray(box.hi) < bounds_lo) or np.any(np.asarray(box.lo) > bounds_hi):
            continue
        candidates = np.all((centers >= box.lo) & (centers <= box.hi), axis=1)
        if not candidates.any():
            continue
        rows = np.nonzero(candidates)[0]
        mask[rows] |= contains(centers[rows], solid)
    return mask.reshape(geometry.dims)


def voxelize(scene, region, h):
    """
    Occupancy grid over ``region``: 1 where the cell center lies inside a
    solid, else 0.
    """
    geometry = GridGeometry.covering(region, h)
    return ScalarGrid3(geometry, occupancy_mask(scene.solids, geometry).astype(float))
