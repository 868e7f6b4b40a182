"""Object-centric environment descriptors."""

import numpy as np

from src.apps.eikonal.fmm import march
from src.apps.scene.grids import Bounds, GridGeometry
from src.apps.scene.voxels import occupancy_mask

from .constants import EnvironmentConfig


def block_means(values, blocks):
    """
    Average of ``values`` over a regular ``blocks`` partition, flattened
    with the first axis fastest.
    """
    means = []
    splits = [np.array_split(np.arange(n), b) for n, b in zip(values.shape, blocks)]
    for zs in splits[2]:
        for ys in splits[1]:
            for xs in splits[0]:
                means.append(values[np.ix_(xs, ys, zs)].mean())
    return np.array(means)


def encode_environment(scene, object_id, size=EnvironmentConfig.CUBE_SIZE, h=EnvironmentConfig.SPACING,
                       blocks=EnvironmentConfig.BLOCKS):
    """
    16-value descriptor of the surroundings of ``object_id``.

    Distances to the other solids are marched over a cube centered on the
    object, capped at the cube half-diagonal, averaged per block and
    divided by that half-diagonal. Free surroundings give all ones.
    """
    center = scene.solid(object_id).center
    geometry = GridGeometry.covering(Bounds.cube(center, size), h)
    half_diagonal = 0.5 * geometry.diagonal
    occupied = occupancy_mask(scene.others(object_id), geometry)
    if occupied.any():
        sources = [(tuple(cell), 0.0) for cell in np.argwhere(occupied)]
        distance, _ = march(np.ones(geometry.dims), geometry.spacing, sources)
    else:
        distance = np.full(geometry.dims, np.inf)
    capped = np.minimum(distance, half_diagonal)
    return block_means(capped, blocks) / half_diagonal
