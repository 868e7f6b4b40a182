"""Rotation utilities on 3x3 matrices and homogeneous transforms."""

import numpy as np
from django.core.exceptions import ValidationError
from scipy.linalg import polar
from scipy.spatial.transform import Rotation, Slerp


SO3_TOLERANCE = 1e-6


def wxyz_to_xyzw(quat):
    return np.asarray(quat, dtype=float)[[1, 2, 3, 0]]


def xyzw_to_wxyz(quat):
    return np.asarray(quat, dtype=float)[[3, 0, 1, 2]]


def quat_to_matrix(quat_wxyz):
    """
    Rotation matrix of a unit quaternion given in (w, x, y, z) order.
    """
    return Rotation.from_quat(wxyz_to_xyzw(quat_wxyz)).as_matrix()


def matrix_to_quat(matrix):
    """
    Unit quaternion (w, x, y, z) with non-negative w.
    """
    quat = xyzw_to_wxyz(Rotation.from_matrix(matrix).as_quat())
    return quat if quat[0] >= 0 else -quat


def is_rotation(matrix, tol=SO3_TOLERANCE):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (3, 3) or not np.all(np.isfinite(matrix)):
        return False
    orthogonal = np.allclose(matrix.T @ matrix, np.eye(3), atol=tol)
    return orthogonal and abs(np.linalg.det(matrix) - 1.0) <= tol


def require_rotation(matrix, label="rotation"):
    """
    Raise ``ValidationError`` unless ``matrix`` lies on SO(3).
    """
    if not is_rotation(matrix):
        raise ValidationError(f"{label} is not a proper rotation matrix.")
    return np.asarray(matrix, dtype=float)


def skew(vector):
    x, y, z = vector
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def perpendicular_axis(vector):
    """
    Deterministic unit vector orthogonal to ``vector``: the two largest
    components are swapped with a sign flip, the third is zeroed.
    """
    vector = np.asarray(vector, dtype=float)
    order = np.argsort(-np.abs(vector), kind="stable")
    first, second = order[0], order[1]
    axis = np.zeros(3)
    axis[first] = -vector[second]
    axis[second] = vector[first]
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        axis = np.zeros(3)
        axis[second] = 1.0
        return axis
    return axis / norm


def rotation_between(source, target):
    """
    Minimal rotation taking unit vector ``source`` onto unit vector
    ``target`` (Rodrigues form). Antiparallel inputs rotate by pi about
    ``perpendicular_axis(source)``.
    """
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    source = source / np.linalg.norm(source)
    target = target / np.linalg.norm(target)
    cross = np.cross(source, target)
    sin_theta = np.linalg.norm(cross)
    cos_theta = float(np.clip(np.dot(source, target), -1.0, 1.0))

    if sin_theta < 1e-12:
        if cos_theta > 0.0:
            return np.eye(3)
        axis = perpendicular_axis(source)
        return Rotation.from_rotvec(np.pi * axis).as_matrix()

    k = skew(cross / sin_theta)
    return np.eye(3) + k * sin_theta + k @ k * (1.0 - cos_theta)


def project_to_so3(matrix):
    """
    Nearest rotation in the Frobenius sense (polar decomposition).
    """
    unitary, _ = polar(np.asarray(matrix, dtype=float))
    if np.linalg.det(unitary) < 0.0:
        u, _, vt = np.linalg.svd(matrix)
        u[:, -1] *= -1.0
        unitary = u @ vt
    return unitary


def rotation_angle(matrix):
    return float(Rotation.from_matrix(matrix).magnitude())


def log_frobenius_norm(matrix):
    """
    ``||log R||_F`` which equals sqrt(2) times the rotation angle.
    """
    return np.sqrt(2.0) * rotation_angle(matrix)


def slerp_matrices(start, end, weight):
    rotations = Rotation.from_matrix(np.stack([start, end]))
    return Slerp([0.0, 1.0], rotations)([float(weight)]).as_matrix()[0]


def frame_from_tangent(tangent, up=(0.0, 0.0, 1.0)):
    """
    Right-handed frame whose first column is ``tangent`` and whose second
    column is horizontal when possible.
    """
    x_axis = np.asarray(tangent, dtype=float)
    x_axis = x_axis / np.linalg.norm(x_axis)
    y_axis = np.cross(np.asarray(up, dtype=float), x_axis)
    if np.linalg.norm(y_axis) < 1e-9:
        y_axis = perpendicular_axis(x_axis)
    y_axis = y_axis / np.linalg.norm(y_axis)
    z_axis = np.cross(x_axis, y_axis)
    return np.column_stack([x_axis, y_axis, z_axis])


def homogeneous(rotation, translation):
    transform = np.eye(4)
    transform[:3, :3] = rotation
    transform[:3, 3] = translation
    return transform


def split_transform(transform):
    transform = np.asarray(transform, dtype=float)
    return transform[:3, :3], transform[:3, 3]


def yaw_rotation(heading):
    """
    Rotation about +z turning +x onto the 2D ``heading`` direction.
    """
    angle = np.arctan2(heading[1], heading[0])
    return Rotation.from_euler("z", angle).as_matrix()
