"""Push penetrating body goals out of the scene."""

import logging
from dataclasses import dataclass

import numpy as np

from src.apps.common.exceptions import ResolutionFailure
from src.apps.scene.solids import gradient_of_distance, scene_signed_distance

from .constants import ErrorMessages, GoalJoint, ResolutionConfig


logger = logging.getLogger(__name__)

MOVABLE_JOINTS = (GoalJoint.HIP, GoalJoint.LEFT_HAND, GoalJoint.RIGHT_HAND)


@dataclass(frozen=True)
class Resolution:
    goals: tuple
    rounds: int
    moved: tuple


def _movable(goal):
    return goal.joint in MOVABLE_JOINTS and not goal.contact


def penetrating(goals, scene):
    """
    Indices of movable goals strictly inside a solid.
    """
    if not scene.solids:
        return []
    return [
        index for index, goal in enumerate(goals)
        if _movable(goal) and scene_signed_distance(goal.position, scene.solids) < 0.0
    ]


def resolve_goal_collision(goals, scene, margin=ResolutionConfig.MARGIN, max_rounds=ResolutionConfig.MAX_ROUNDS):
    """
    Move the hip and non-contact hand goals that penetrate a solid along
    the distance gradient by their depth plus ``margin``, repeating until
    none penetrate. Contact goals and the root stay where they are.
    """
    goals = list(goals)
    moved = set()
    for rounds in range(max_rounds + 1):
        inside = penetrating(goals, scene)
        if not inside:
            if moved:
                logger.info("Resolved goal collisions for %s in %d rounds", sorted(moved), rounds)
            return Resolution(tuple(goals), rounds, tuple(sorted(moved)))
        if rounds == max_rounds:
            break
        for index in inside:
            goal = goals[index]
            depth = -scene_signed_distance(goal.position, scene.solids)
            normal = gradient_of_distance(goal.position, scene.solids)
            if not np.any(normal):
                normal = np.array([0.0, 0.0, 1.0])
            goals[index] = goal.moved((depth + margin) * normal)
            moved.add(str(goal.joint))

    joints = sorted(str(goals[index].joint) for index in penetrating(goals, scene))
    raise ResolutionFailure(ErrorMessages.UNRESOLVED.format(joints=", ".join(joints), rounds=max_rounds), joints=joints)
