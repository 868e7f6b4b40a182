"""Orientation transfer from a prior trajectory onto a new positional path."""

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.rotations import perpendicular_axis, project_to_so3, rotation_between, skew

from .constants import ErrorMessages
from .trajectory import Trajectory6, path_tangents, timestamps


def paired_prior_indices(prior_length, prior_contact, path_length, path_contact):
    """
    Prior frame paired with every path frame, counted from the contact
    frames outward. Path frames beyond either end of the prior reuse the
    prior's first or last frame.
    """
    offsets = np.arange(path_length) - path_contact
    return np.clip(prior_contact + offsets, 0, prior_length - 1)


def _column_alignment(column, tangent):
    """
    Rotation by the angle between ``column`` and ``tangent`` about their
    common normal. Antiparallel inputs rotate by pi about
    ``perpendicular_axis(column)``.
    """
    cross = np.cross(column, tangent)
    sin_theta = float(np.linalg.norm(cross))
    cos_theta = float(np.clip(np.dot(column, tangent), -1.0, 1.0))
    if sin_theta < 1e-12:
        if cos_theta > 0.0:
            return np.eye(3)
        axis = perpendicular_axis(column)
        sin_theta, cos_theta = 0.0, -1.0
    else:
        axis = cross / sin_theta
    k = skew(axis)
    return np.eye(3) + k * sin_theta + k @ k * (1.0 - cos_theta)


def _literal_rotation(prior_rotation, prior_tangent, new_tangent):
    columns = [
        _column_alignment(prior_rotation[:, j], prior_tangent) @ new_tangent
        for j in range(3)
    ]
    return project_to_so3(np.column_stack(columns))


def transfer_orientation(prior, positions, speeds=None, contact_index=-1, literal=False, start_time=0.0):
    """
    Trajectory along ``positions`` whose rotations follow ``prior``.

    Frame ``n - i`` of the path takes the rotation of prior frame
    ``m - i`` (``n``, ``m`` the contact frames), turned by the minimal
    rotation from the prior tangent onto the path tangent. ``literal``
    instead builds each column from the path tangent as written per
    column. Rotations are polar-projected onto SO(3); the contact frame
    keeps the prior contact rotation exactly.
    """
    positions = np.asarray(positions, dtype=float)
    if len(prior) < 2 or len(positions) < 2:
        raise ValidationError(ErrorMessages.TOO_SHORT.format(name="Orientation transfer", count=2))
    if contact_index < 0:
        contact_index += len(positions)
    speeds = np.ones(len(positions)) if speeds is None else np.asarray(speeds, dtype=float)

    tangents = path_tangents(positions)
    pairs = paired_prior_indices(len(prior), prior.contact_index, len(positions), contact_index)
    rotations = np.empty((len(positions), 3, 3))
    for i, j in enumerate(pairs):
        prior_rotation = prior.rotations[j]
        prior_tangent = prior.tangents[j]
        if literal:
            rotations[i] = _literal_rotation(prior_rotation, prior_tangent, tangents[i])
        else:
            rotations[i] = project_to_so3(rotation_between(prior_tangent, tangents[i]) @ prior_rotation)
    rotations[contact_index] = prior.contact_rotation

    return Trajectory6(
        timestamps(positions, speeds, start_time),
        positions,
        rotations,
        tangents,
        speeds,
        contact_index,
    )
