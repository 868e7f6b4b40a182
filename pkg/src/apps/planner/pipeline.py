"""End-to-end wrist trajectory planning from time-of-arrival fields."""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.apps.eikonal.constants import FieldConfig
from src.apps.eikonal.fields import arrival_from_toa

from .blending import blend_to_prior
from .constants import BaselineConfig, BlendConfig, ExtractionConfig, Segment, TrajectoryTolerance
from .extraction import integrate_path, select_start
from .orientation import transfer_orientation
from .trajectory import drop_repeated_points


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlanResult:
    """
    A planned trajectory with the raw extracted path and the distance
    between the end of that path and the prior contact point.
    """
    trajectory: object
    path: object
    start: np.ndarray
    contact_gap: float
    notes: tuple = field(default=())


def _close_on_contact(positions, speeds, contact):
    if np.linalg.norm(positions[-1] - contact) > TrajectoryTolerance.DUPLICATE_POINT:
        positions = np.vstack([positions, contact])
        speeds = np.append(speeds, speeds[-1])
    return positions, speeds


def plan_with_fields(fields, prior, wrist, segment=Segment.APPROACH, step=None,
                     v_bar=ExtractionConfig.AVERAGE_WALKING_SPEED, n_blend=BlendConfig.BLEND_FRAMES,
                     horizon=FieldConfig.ARRIVAL_HORIZON, hadamard=False, literal=False):
    """
    Plan an approach (or leave) trajectory for ``prior`` through the
    time-of-arrival channel of ``fields``.

    The arrival field is recovered from D_toa, the start is chosen near
    the wrist, the field is descended to its sink and the path is closed
    on the prior contact point. Orientations come from the prior and the
    frames next to contact are blended into it. A leave segment is planned
    as an approach and reversed, so its contact is the first frame.
    """
    phi = arrival_from_toa(fields.d_toa, horizon)
    start = select_start(phi, wrist, v_bar)
    path = integrate_path(phi, start, step, hadamard=hadamard)

    contact = prior.contact_position
    positions, speeds = drop_repeated_points(path.positions, path.speeds)
    gap = float(np.linalg.norm(positions[-1] - contact))
    positions, speeds = _close_on_contact(positions, speeds, contact)

    if segment == Segment.LEAVE:
        positions, speeds = positions[::-1], speeds[::-1]
        contact_index = 0
    else:
        contact_index = len(positions) - 1

    trajectory = transfer_orientation(prior, positions, speeds, contact_index, literal=literal)
    blend = min(int(n_blend), len(trajectory), len(prior))
    trajectory = blend_to_prior(trajectory, prior, blend, segment)
    logger.debug(
        "Planned %d frames from %s, contact gap %.4f m",
        len(trajectory), np.round(start, 3).tolist(), gap,
    )
    return PlanResult(trajectory, path, start, gap, path.notes)


def straight_line_plan(prior, wrist, samples=BaselineConfig.STRAIGHT_SAMPLES,
                       speed=BaselineConfig.STRAIGHT_SPEED, segment=Segment.APPROACH):
    """
    Constant-speed straight segment between the wrist and the prior
    contact point, oriented from the prior.
    """
    wrist = np.asarray(wrist, dtype=float)
    contact = prior.contact_position
    positions = np.linspace(wrist, contact, max(int(samples), 2))
    if segment == Segment.LEAVE:
        positions = positions[::-1]
        contact_index = 0
    else:
        contact_index = len(positions) - 1
    trajectory = transfer_orientation(prior, positions, np.full(len(positions), float(speed)), contact_index)
    return PlanResult(trajectory, None, wrist, 0.0)
