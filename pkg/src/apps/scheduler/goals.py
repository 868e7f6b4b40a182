"""Keyjoint goals and the standing body layout they are built from."""

from dataclasses import dataclass, replace

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.rotations import homogeneous, is_rotation, yaw_rotation
from src.apps.planner.constants import Action

from .constants import HAND_JOINTS, BodyConfig, ErrorMessages, GoalJoint


@dataclass(frozen=True)
class KeyjointGoal:
    """
    Position and rotation one keyjoint should reach at ``time``, with the
    action it serves and whether the joint is in contact there.
    """
    joint: str
    position: np.ndarray
    rotation: np.ndarray
    action: str = ""
    contact: bool = False
    time: float = 0.0

    def __post_init__(self):
        if self.joint not in GoalJoint.values:
            raise ValidationError(f"Unknown keyjoint {self.joint!r}.")
        position = np.asarray(self.position, dtype=float).reshape(3)
        rotation = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        if not is_rotation(rotation):
            raise ValidationError(ErrorMessages.NOT_ROTATION.format(joint=self.joint))
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "contact", bool(self.contact))
        object.__setattr__(self, "time", float(self.time))

    @property
    def transform(self):
        return homogeneous(self.rotation, self.position)

    def moved(self, offset):
        return replace(self, position=self.position + np.asarray(offset, dtype=float))

    def transformed(self, rotation, translation):
        rotation = np.asarray(rotation, dtype=float)
        return replace(self, position=rotation @ self.position + translation, rotation=rotation @ self.rotation)

    def to_dict(self):
        return {
            "joint": self.joint,
            "transform": self.transform.tolist(),
            "position": self.position.tolist(),
            "rotation": self.rotation.reshape(9).tolist(),
            "action": self.action,
            "contact": self.contact,
            "time": self.time,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["joint"],
            data["position"],
            np.asarray(data["rotation"]).reshape(3, 3),
            data.get("action", ""),
            data.get("contact", False),
            data.get("time", 0.0),
        )


def goal_transforms(goals):
    """
    ``{joint: 4x4 transform}`` of a goal set.
    """
    return {goal.joint: goal.transform for goal in goals}


def goal_set_to_dict(goals):
    return [goal.to_dict() for goal in goals]


def goal_set_from_dict(data):
    return tuple(KeyjointGoal.from_dict(item) for item in data)


def standing_goals(root, heading, hand=None, hand_target=None, hand_rotation=None, action="", time=0.0,
                   lateral_shift=0.0):
    """
    Goal set of a character standing at the 2D ``root`` facing
    ``heading``: the root on the ground, the hip above it and both hands
    at rest beside the hip. With ``hand`` the named hand instead reaches
    ``hand_target`` in contact.
    """
    heading = np.asarray(heading, dtype=float)
    rotation = yaw_rotation(heading)
    left = rotation[:, 1]
    ground = np.array([root[0], root[1], 0.0]) + lateral_shift * left
    hip = ground + [0.0, 0.0, BodyConfig.HIP_HEIGHT]
    goals = [
        KeyjointGoal(GoalJoint.ROOT, ground, rotation, action, False, time),
        KeyjointGoal(GoalJoint.HIP, hip, rotation, action, False, time),
    ]
    for name, side in (("left", 1.0), ("right", -1.0)):
        joint = HAND_JOINTS[name]
        if name == hand:
            target_rotation = rotation if hand_rotation is None else hand_rotation
            goals.append(KeyjointGoal(joint, hand_target, target_rotation, action, True, time))
        else:
            rest = hip + side * BodyConfig.HAND_SPREAD * left - [0.0, 0.0, BodyConfig.IDLE_HAND_DROP]
            goals.append(KeyjointGoal(joint, rest, rotation, action, False, time))
    return tuple(goals)


def reaching_goals(contact, approach, hand, action=Action.GRASP, time=0.0, hand_rotation=None):
    """
    Standing goal set for reaching ``contact`` from the horizontal
    ``approach`` direction (pointing from the object toward the body).
    The body stands ``STAND_OFF`` back and shifted away from the reaching
    hand.
    """
    contact = np.asarray(contact, dtype=float)
    approach = np.asarray(approach, dtype=float)[:2]
    norm = np.linalg.norm(approach)
    approach = approach / norm if norm > 1e-9 else np.array([1.0, 0.0])
    root = contact[:2] + BodyConfig.STAND_OFF * approach
    shift = BodyConfig.HAND_SPREAD if hand == "right" else -BodyConfig.HAND_SPREAD
    return standing_goals(root, -approach, hand, contact, hand_rotation, action, time, lateral_shift=shift)


def goal_for(goals, joint):
    for goal in goals:
        if goal.joint == joint:
            return goal
    raise ValidationError(f"Goal set has no {joint} goal.")
