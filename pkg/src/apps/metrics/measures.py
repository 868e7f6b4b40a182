"""End-effector trajectory metrics, reported in centimeters and seconds."""

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.scene.solids import unsigned_distance

from .constants import CM_PER_M, BenchConfig, ErrorMessages, MeasureTolerance


def _require_frames(trajectory, name):
    if len(trajectory) < BenchConfig.MIN_FRAMES:
        raise ValidationError(
            ErrorMessages.TOO_FEW_FRAMES.format(name=name, count=BenchConfig.MIN_FRAMES, found=len(trajectory))
        )


def second_differences(times, positions):
    """
    Accelerations at the interior samples of a possibly non-uniformly
    timestamped path.
    """
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    steps = np.diff(times)
    before, after = steps[:-1, None], steps[1:, None]
    forward = (positions[2:] - positions[1:-1]) / after
    backward = (positions[1:-1] - positions[:-2]) / before
    return 2.0 * (forward - backward) / (before + after)


def unsmoothness(trajectory):
    """
    Mean acceleration magnitude over the interior frames, in cm/s².
    """
    _require_frames(trajectory, "Unsmoothness")
    accelerations = second_differences(trajectory.times, trajectory.positions)
    return float(np.mean(np.linalg.norm(accelerations, axis=1)) * CM_PER_M)


def vertex_curvatures(positions, tolerance=MeasureTolerance.DEGENERATE_SEGMENT):
    """
    Circumscribed-circle curvature (1/m) at each interior vertex after
    dropping zero-length segments. Endpoints have none.
    """
    positions = np.asarray(positions, dtype=float)
    kept = [positions[0]]
    for point in positions[1:]:
        if np.linalg.norm(point - kept[-1]) > tolerance:
            kept.append(point)
    points = np.array(kept)
    if len(points) < 3:
        raise ValidationError(ErrorMessages.ALL_DEGENERATE)

    incoming = points[1:-1] - points[:-2]
    outgoing = points[2:] - points[1:-1]
    chord = np.linalg.norm(incoming + outgoing, axis=1)
    # A path folding back onto itself has no circumscribed circle.
    valid = chord > tolerance
    if not valid.any():
        raise ValidationError(ErrorMessages.ALL_DEGENERATE)
    area2 = np.linalg.norm(np.cross(incoming[valid], outgoing[valid]), axis=1)
    sides = np.linalg.norm(incoming[valid], axis=1) * np.linalg.norm(outgoing[valid], axis=1) * chord[valid]
    return 2.0 * area2 / sides


def rms_curvature(trajectory):
    """
    Root-mean-square path curvature in 1/cm.
    """
    _require_frames(trajectory, "Curvature")
    curvatures = vertex_curvatures(trajectory.positions)
    return float(np.sqrt(np.mean(curvatures ** 2)) / CM_PER_M)


def contact_window(trajectory, window=BenchConfig.CONTACT_WINDOW):
    """
    Mask of the frames within ``window`` meters of the contact position.
    """
    if window <= 0.0:
        raise ValidationError(ErrorMessages.BAD_WINDOW)
    offsets = trajectory.positions - trajectory.contact_position
    return np.linalg.norm(offsets, axis=1) <= window


def safety_distance(trajectory, scene, window=BenchConfig.CONTACT_WINDOW):
    """
    Mean clearance (cm) of the hand from the non-target solids over the
    frames near contact; infinite in a scene without obstacles.
    """
    obstacles = list(scene.obstacles)
    if not obstacles:
        return float("inf")
    near = trajectory.positions[contact_window(trajectory, window)]
    return float(np.mean(unsigned_distance(near, obstacles)) * CM_PER_M)


def contact_reached(trajectory, scene, tolerance):
    return unsigned_distance(trajectory.contact_position, [scene.target]) <= tolerance
