"""Unit tests for bimanual task scheduling."""

from itertools import product

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.spatial.transform import Rotation

from src.apps.common.exceptions import SchedulingFailure
from src.apps.scheduler.bimanual import assignment_cost, goal_deviation, schedule_bimanual
from src.apps.scheduler.constants import GoalJoint, ScheduleMode
from src.apps.scheduler.goals import KeyjointGoal, goal_for, reaching_goals, standing_goals


POSE = standing_goals((0.0, 0.0), (1.0, 0.0))


def random_goal_set(rng, contact_joint=None):
    return tuple(
        KeyjointGoal(
            joint,
            rng.uniform(-1.0, 1.0, 3),
            Rotation.random(random_state=int(rng.integers(2 ** 31))).as_matrix(),
            contact=joint == contact_joint,
        )
        for joint in GoalJoint.values
    )


def per_hand(rng, count):
    return {
        hand: [random_goal_set(rng, joint) for _ in range(count)]
        for hand, joint in (("left", GoalJoint.LEFT_HAND), ("right", GoalJoint.RIGHT_HAND))
    }


def shifted_set(x):
    """
    Identity-rotation goal set with every keyjoint at ``(x, 0, 1)``.
    """
    return tuple(KeyjointGoal(joint, (x, 0.0, 1.0), np.eye(3)) for joint in GoalJoint.values)


def reference_deviation(first, second, body_width=0.4):
    total = 0.0
    for joint in (GoalJoint.LEFT_HAND, GoalJoint.RIGHT_HAND, GoalJoint.HIP):
        a, b = goal_for(first, joint), goal_for(second, joint)
        angle = Rotation.from_matrix(a.rotation.T @ b.rotation).magnitude()
        total += np.sqrt(2.0) * angle / np.pi + np.linalg.norm(a.position - b.position) / body_width
    return total


def reference_cost(target, auxiliary, pose, weight=2.0):
    return reference_deviation(auxiliary, pose) + weight * reference_deviation(auxiliary, target)


class ScheduleBimanualTest(SimpleTestCase):
    """
    Unit tests for schedule_bimanual.
    """

    def test_single_free_hand_is_sequential(self):
        """
        Test that with only the left hand free both tasks go to it in
        order: auxiliary first, then the target.
        """
        target = {"left": [reaching_goals((0.6, 0.0, 1.0), (-1.0, 0.0, 0.0), "left")]}
        door = {"left": [reaching_goals((0.6, 0.0, 1.3), (-1.0, 0.0, 0.0), "left")]}
        schedule = schedule_bimanual(target, door, POSE, {"left"})
        self.assertEqual(schedule.mode, ScheduleMode.SEQUENTIAL)
        self.assertEqual(schedule.assignment, {"target": "left", "auxiliary": "left"})
        self.assertEqual(len(schedule.keyframes), 2)
        self.assertIs(schedule.keyframes[0], door["left"][0])
        self.assertIs(schedule.keyframes[1], target["left"][0])

    def test_equal_costs_prefer_cotemporal_right_target(self):
        """
        Test that when every assignment costs the same the right hand takes
        the target while the left holds the auxiliary object.
        """
        shared = standing_goals((0.3, 0.0), (1.0, 0.0))
        target = {"left": [shared], "right": [shared]}
        door = {"left": [shared], "right": [shared]}
        schedule = schedule_bimanual(target, door, POSE, {"left", "right"})
        self.assertEqual(schedule.mode, ScheduleMode.CO_TEMPORAL)
        self.assertEqual(schedule.assignment, {"target": "right", "auxiliary": "left"})
        self.assertTrue(goal_for(schedule.keyframes[1], GoalJoint.LEFT_HAND).contact)

    def test_matches_exhaustive_enumeration(self):
        """
        Test that on random instances the schedule cost equals the minimum
        of the auxiliary-anchored cost over every hand assignment and
        candidate pair.
        """
        rng = np.random.default_rng(23)
        for _ in range(100):
            target, door = per_hand(rng, 4), per_hand(rng, 4)
            pose = random_goal_set(rng)
            costs = [
                reference_cost(target[h_t][i], door[h_a][j], pose)
                for h_t, h_a, i, j in product(("left", "right"), ("left", "right"), range(4), range(4))
            ]
            schedule = schedule_bimanual(target, door, pose, {"left", "right"})
            self.assertAlmostEqual(schedule.cost, min(costs), places=9)
            expected_mode = (
                ScheduleMode.CO_TEMPORAL if schedule.target_hand != schedule.auxiliary_hand
                else ScheduleMode.SEQUENTIAL
            )
            self.assertEqual(schedule.mode, expected_mode)

    def test_auxiliary_closer_to_pose_wins(self):
        """
        Test that of two auxiliary candidates equally far from the target
        the one nearer the current pose is chosen.
        """
        target = shifted_set(1.0)
        far, near = shifted_set(1.4), shifted_set(0.6)
        schedule = schedule_bimanual({"right": [target]}, {"right": [far, near]}, shifted_set(0.0), {"right"})
        self.assertIs(schedule.keyframes[0], near)
        self.assertAlmostEqual(schedule.cost, 3 * 0.6 / 0.4 + 2.0 * 3 * 0.4 / 0.4)
        self.assertAlmostEqual(assignment_cost(target, far, shifted_set(0.0)), 3 * 1.4 / 0.4 + 2.0 * 3 * 0.4 / 0.4)

    def test_without_auxiliary_task(self):
        """
        Test that a lone target task yields one keyframe on the closer
        candidate.
        """
        near = reaching_goals((0.6, -0.2, 1.0), (-1.0, 0.0, 0.0), "right")
        far = reaching_goals((2.6, 1.0, 1.0), (-1.0, 0.0, 0.0), "left")
        schedule = schedule_bimanual({"right": [near], "left": [far]}, None, POSE, {"left", "right"})
        self.assertEqual(len(schedule.keyframes), 1)
        self.assertIs(schedule.keyframes[0], near)
        self.assertEqual(schedule.target_hand, "right")
        self.assertLess(goal_deviation(near, POSE), goal_deviation(far, POSE))

    def test_no_free_hand(self):
        """
        Test that scheduling with both hands busy fails.
        """
        shared = standing_goals((0.3, 0.0), (1.0, 0.0))
        with self.assertRaises(SchedulingFailure):
            schedule_bimanual({"right": [shared]}, None, POSE, set())

    def test_missing_candidates(self):
        """
        Test that a free hand without candidates is an input error.
        """
        with self.assertRaises(ValidationError):
            schedule_bimanual({"right": []}, None, POSE, {"right"})

    def test_one_onset_per_hand_per_keyframe(self):
        """
        Test that no keyframe starts two contacts on the same hand.
        """
        rng = np.random.default_rng(5)
        for _ in range(20):
            schedule = schedule_bimanual(per_hand(rng, 2), per_hand(rng, 2), random_goal_set(rng), {"left", "right"})
            onsets = schedule.contact_onsets()
            self.assertEqual(len(onsets), len(set(onsets)))
