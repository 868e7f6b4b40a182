"""Collision audit of planned trajectories against scene solids."""

import logging
from dataclasses import dataclass

import numpy as np

from src.apps.scene.solids import closest_surface_point, nearest_solid, scene_signed_distance, unsigned_distance

from .constants import AuditConfig


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuditReport:
    collision_free: bool
    min_distance: float
    distances: np.ndarray
    offending_frame: int = None
    offending_solid: str = None
    attached_penetration: float = 0.0

    def to_dict(self):
        return {
            "collision_free": self.collision_free,
            "min_distance": self.min_distance,
            "offending_frame": self.offending_frame,
            "offending_solid": self.offending_solid,
            "attached_penetration": self.attached_penetration,
        }


def fibonacci_directions(count):
    """
    Nearly uniform unit vectors on the sphere.
    """
    index = np.arange(count) + 0.5
    polar = np.arccos(1.0 - 2.0 * index / count)
    azimuth = np.pi * (1.0 + 5.0 ** 0.5) * index
    return np.column_stack([
        np.cos(azimuth) * np.sin(polar),
        np.sin(azimuth) * np.sin(polar),
        np.cos(polar),
    ])


def target_surface_samples(target, count=AuditConfig.ATTACHED_SURFACE_SAMPLES):
    far = target.center + fibonacci_directions(count) * (4.0 * target.bounding_radius + 1.0)
    return closest_surface_point(far, target)


def _attached_penetration(trajectory, target, obstacles):
    """
    Deepest penetration of the target carried rigidly by every non-contact
    frame, and the frame where it occurs.
    """
    samples = target_surface_samples(target)
    contact_rotation = trajectory.contact_rotation
    local = (samples - trajectory.contact_position) @ contact_rotation
    deepest, frame = 0.0, None
    for i in range(len(trajectory)):
        if i == trajectory.contact_index:
            continue
        carried = local @ trajectory.rotations[i].T + trajectory.positions[i]
        depth = -float(np.min(scene_signed_distance(carried, obstacles)))
        if depth > deepest:
            deepest, frame = depth, i
    return deepest, frame


def audit_collision(trajectory, scene, clearance=AuditConfig.CLEARANCE, carrying=False,
                    attached_tolerance=AuditConfig.ATTACHED_TOLERANCE):
    """
    Exact clearance of every frame position from the non-target solids.

    A frame is in collision when its clearance does not exceed
    ``clearance``; the first such frame and its nearest solid are
    reported. With ``carrying`` the target is attached to the hand at the
    contact frame and swept along the other frames; penetrations deeper
    than ``attached_tolerance`` also count as collisions.
    """
    obstacles = list(scene.obstacles)
    positions = trajectory.positions
    if not obstacles:
        return AuditReport(True, float("inf"), np.full(len(trajectory), np.inf))

    distances = unsigned_distance(positions, obstacles)
    colliding = np.nonzero(distances <= clearance)[0]
    min_distance = float(distances.min())
    if len(colliding):
        frame = int(colliding[0])
        solid = obstacles[int(nearest_solid(positions[frame], obstacles)[0])]
        logger.info("Frame %d collides with %s", frame, solid.id)
        return AuditReport(False, min_distance, distances, frame, solid.id)

    penetration = 0.0
    if carrying:
        penetration, frame = _attached_penetration(trajectory, scene.target, obstacles)
        if frame is not None and penetration > attached_tolerance:
            carried_at = trajectory.positions[frame]
            solid = obstacles[int(nearest_solid(carried_at, obstacles)[0])]
            logger.info("Carried object penetrates %s by %.4f m at frame %d", solid.id, penetration, frame)
            return AuditReport(False, min_distance, distances, frame, solid.id, penetration)

    return AuditReport(True, min_distance, distances, attached_penetration=penetration)
