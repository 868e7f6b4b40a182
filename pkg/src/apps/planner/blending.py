"""Contact-preserving blending of a planned trajectory toward its prior."""

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.rotations import project_to_so3, slerp_matrices

from .constants import BlendConfig, Segment
from .trajectory import Trajectory6


def blend_weights(n_blend):
    """
    Weights of the last ``n_blend`` approach frames, ending at 1 on the
    contact frame.
    """
    return (np.arange(n_blend) + 1.0) / n_blend


def blend_to_prior(trajectory, prior, n_blend=BlendConfig.BLEND_FRAMES, segment=Segment.APPROACH):
    """
    Pull the frames next to contact toward the prior's.

    Approach segments blend their final ``n_blend`` frames against the
    prior's frames leading into its contact; leave segments blend their
    first ``n_blend`` frames against the prior's frames leaving it. The
    weight ramps linearly so the contact frame equals the prior's. Times
    are kept from ``trajectory``.
    """
    n_blend = int(n_blend)
    if n_blend < 1 or n_blend > len(trajectory) or n_blend > len(prior):
        raise ValidationError(
            f"Blend length {n_blend} must lie in [1, {min(len(trajectory), len(prior))}]."
        )

    if segment == Segment.LEAVE:
        ours = np.arange(n_blend)
        theirs = np.clip(prior.contact_index + np.arange(n_blend), 0, len(prior) - 1)
        weights = blend_weights(n_blend)[::-1]
        contact = 0
    else:
        ours = np.arange(len(trajectory) - n_blend, len(trajectory))
        theirs = np.clip(prior.contact_index - n_blend + 1 + np.arange(n_blend), 0, len(prior) - 1)
        weights = blend_weights(n_blend)
        contact = len(trajectory) - 1

    positions = np.array(trajectory.positions)
    rotations = np.array(trajectory.rotations)
    tangents = np.array(trajectory.tangents)
    speeds = np.array(trajectory.speeds)
    for i, j, weight in zip(ours, theirs, weights):
        positions[i] = (1.0 - weight) * positions[i] + weight * prior.positions[j]
        rotations[i] = project_to_so3(slerp_matrices(rotations[i], prior.rotations[j], weight))
        tangent = (1.0 - weight) * tangents[i] + weight * prior.tangents[j]
        norm = np.linalg.norm(tangent)
        if norm > 1e-9:
            tangents[i] = tangent / norm
        speeds[i] = (1.0 - weight) * speeds[i] + weight * prior.speeds[j]

    positions[contact] = prior.contact_position
    rotations[contact] = prior.contact_rotation
    tangents[contact] = prior.tangents[prior.contact_index]

    return Trajectory6(trajectory.times, positions, rotations, tangents, speeds, contact)
