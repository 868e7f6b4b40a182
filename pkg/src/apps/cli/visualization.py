"""PLY point clouds and CSV heatmap slices for third-party viewers."""

import csv
import io

import numpy as np
from django.core.exceptions import ValidationError

from .constants import ErrorMessages


AXES = {"x": 0, "y": 1, "z": 2}
SLICE_COLUMNS = ("x", "y", "z", "value")


def ply_text(points, properties=None, run_config=None):
    """
    ASCII PLY vertex cloud. ``properties`` maps extra per-vertex scalar
    names to arrays aligned with ``points``.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    properties = {name: np.asarray(values, dtype=float) for name, values in (properties or {}).items()}
    lines = ["ply", "format ascii 1.0"]
    if run_config is not None:
        lines.append(f"comment config_hash {run_config.digest}")
    lines.append(f"element vertex {len(points)}")
    lines += [f"property float {name}" for name in ("x", "y", "z", *properties)]
    lines.append("end_header")
    columns = np.column_stack([points, *properties.values()]) if properties else points
    lines += [" ".join(repr(float(value)) for value in row) for row in columns]
    return "\n".join(lines) + "\n"


def trajectory_cloud(trajectory):
    return trajectory.positions, {"time": trajectory.times, "speed": trajectory.speeds}


def field_cloud(fields, channel, minimum=0.0):
    """
    Cell centers whose ``channel`` value is finite and above ``minimum``.
    """
    grid = getattr(fields, channel)
    keep = np.isfinite(grid.values) & (grid.values > minimum)
    centers = grid.geometry.cell_centers()[keep]
    return centers, {channel: grid.values[keep]}


def field_slice(fields, channel, axis, at=None):
    """
    Cell centers and ``channel`` values of the grid layer nearest to the
    plane ``axis = at``; the middle layer when ``at`` is omitted.
    """
    grid = getattr(fields, channel)
    geometry = grid.geometry
    a = AXES[axis]
    if at is None:
        layer = geometry.dims[a] // 2
    else:
        layer = int(np.floor((float(at) - geometry.origin[a]) / geometry.spacing))
        if not 0 <= layer < geometry.dims[a]:
            raise ValidationError(ErrorMessages.SLICE_OUTSIDE.format(axis=axis, at=at))
    index = [slice(None)] * 3
    index[a] = layer
    centers = geometry.cell_centers()[tuple(index)].reshape(-1, 3)
    return centers, grid.values[tuple(index)].reshape(-1)


def slice_csv(points, values, run_config=None):
    buffer = io.StringIO()
    if run_config is not None:
        buffer.write(f"# config_hash={run_config.digest}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SLICE_COLUMNS)
    for point, value in zip(points, values):
        writer.writerow([*(repr(float(v)) for v in point), repr(float(value))])
    return buffer.getvalue()
