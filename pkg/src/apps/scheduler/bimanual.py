"""Hand assignment for a target task and an optional auxiliary task."""

import logging
from dataclasses import dataclass, replace
from itertools import product

from django.core.exceptions import ValidationError

from src.apps.common.exceptions import SchedulingFailure
from src.apps.phase.kalman import pose_deviation

from .constants import HAND_JOINTS, BodyConfig, ErrorMessages, GoalJoint, ScheduleConfig, ScheduleMode
from .goals import goal_for, goal_set_to_dict, goal_transforms


logger = logging.getLogger(__name__)

DEVIATION_JOINTS = (GoalJoint.LEFT_HAND, GoalJoint.RIGHT_HAND, GoalJoint.HIP)
# Right first so that equal costs fall to the right hand.
HAND_ORDER = ("right", "left")


def goal_deviation(first, second, body_width=BodyConfig.BODY_WIDTH):
    """
    Keyjoint deviation between two goal sets over both hands and the hip.
    """
    return pose_deviation(
        goal_transforms(first), goal_transforms(second), body_width=body_width, keyjoints=DEVIATION_JOINTS,
    )


@dataclass(frozen=True)
class Schedule:
    """
    Ordered keyframes and the hands given to the target and auxiliary
    tasks.
    """
    keyframes: tuple
    target_hand: str
    auxiliary_hand: str = None
    mode: str = ScheduleMode.SEQUENTIAL
    cost: float = 0.0

    @property
    def assignment(self):
        return {"target": self.target_hand, "auxiliary": self.auxiliary_hand}

    def contact_onsets(self):
        """
        ``(keyframe, joint)`` for every joint that starts a contact.
        """
        onsets = []
        previous = set()
        for number, goals in enumerate(self.keyframes):
            touching = {goal.joint for goal in goals if goal.contact}
            onsets.extend((number, joint) for joint in sorted(touching - previous))
            previous = touching
        return onsets

    def to_dict(self):
        return {
            "mode": str(self.mode),
            "assignment": self.assignment,
            "cost": self.cost,
            "keyframes": [goal_set_to_dict(goals) for goals in self.keyframes],
        }


def assignment_cost(target, auxiliary, pose, weight=ScheduleConfig.AUXILIARY_WEIGHT,
                    body_width=BodyConfig.BODY_WIDTH):
    """
    Deviation of the auxiliary goals from the current pose plus ``weight``
    times their deviation from the target goals. Without an auxiliary
    task the target goals are measured against the pose alone.
    """
    if auxiliary is None:
        return goal_deviation(target, pose, body_width)
    return goal_deviation(auxiliary, pose, body_width) + weight * goal_deviation(auxiliary, target, body_width)


def _holding(target, auxiliary, hand):
    """
    Target keyframe in which ``hand`` keeps its auxiliary contact.
    """
    joint = HAND_JOINTS[hand]
    held = goal_for(auxiliary, joint)
    return tuple(
        replace(goal, position=held.position, rotation=held.rotation, action=held.action, contact=True)
        if goal.joint == joint else goal
        for goal in target
    )


def _require(candidates, hand, task):
    options = candidates.get(hand) or ()
    if not options:
        raise ValidationError(ErrorMessages.NO_CANDIDATES.format(hand=hand, task=task))
    return options


def enumerate_assignments(target_matches, aux_matches, free_hands):
    """
    Every ``(target hand, aux hand, target index, aux index)`` combination
    allowed by the free hands, in tie-break order.
    """
    hands = [hand for hand in HAND_ORDER if hand in free_hands]
    if aux_matches is None:
        for hand in hands:
            for i in range(len(_require(target_matches, hand, "target"))):
                yield hand, None, i, None
        return
    for target_hand, aux_hand in product(hands, hands):
        targets = _require(target_matches, target_hand, "target")
        auxiliaries = _require(aux_matches, aux_hand, "auxiliary")
        for i, j in product(range(len(targets)), range(len(auxiliaries))):
            yield target_hand, aux_hand, i, j


def schedule_bimanual(target_matches, aux_matches, pose, free_hands, weight=ScheduleConfig.AUXILIARY_WEIGHT,
                      body_width=BodyConfig.BODY_WIDTH):
    """
    Cheapest hand assignment for the target task and, when
    ``aux_matches`` is given, the auxiliary task (opening a door, holding
    an obstacle aside) that has to happen first.

    ``target_matches`` and ``aux_matches`` map a hand to its candidate
    goal sets; ``pose`` is the current goal set. Equal costs prefer two
    different hands working together, then the right hand on the target,
    then earlier candidates.
    """
    free = {str(hand) for hand in free_hands}
    if not free:
        raise SchedulingFailure(ErrorMessages.NO_FREE_HAND)

    best = None
    for target_hand, aux_hand, i, j in enumerate_assignments(target_matches, aux_matches, free):
        target = target_matches[target_hand][i]
        auxiliary = aux_matches[aux_hand][j] if aux_hand is not None else None
        cost = assignment_cost(target, auxiliary, pose, weight, body_width)
        together = aux_hand is not None and aux_hand != target_hand
        key = (cost, not together, target_hand != "right", i, j or 0)
        if best is None or key < best[0]:
            best = (key, target_hand, aux_hand, target, auxiliary)

    (cost, *_), target_hand, aux_hand, target, auxiliary = best
    if auxiliary is None:
        return Schedule((target,), target_hand, None, ScheduleMode.SEQUENTIAL, cost)
    if aux_hand != target_hand:
        keyframes = (auxiliary, _holding(target, auxiliary, aux_hand))
        mode = ScheduleMode.CO_TEMPORAL
    else:
        keyframes = (auxiliary, target)
        mode = ScheduleMode.SEQUENTIAL
    logger.debug("Scheduled %s with target on %s, auxiliary on %s (cost %.4f)", mode, target_hand, aux_hand, cost)
    return Schedule(keyframes, target_hand, aux_hand, mode, cost)
