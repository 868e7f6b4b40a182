"""Unit tests for keyjoint goals and the standing layout."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.scheduler.constants import BodyConfig, GoalJoint
from src.apps.scheduler.goals import KeyjointGoal, goal_for, goal_transforms, reaching_goals, standing_goals


class KeyjointGoalTest(SimpleTestCase):
    """
    Unit tests for KeyjointGoal.
    """

    def test_rejects_non_rotation(self):
        """
        Test that a scaled matrix is rejected as a goal rotation.
        """
        with self.assertRaises(ValidationError):
            KeyjointGoal(GoalJoint.HIP, (0.0, 0.0, 1.0), 2.0 * np.eye(3))

    def test_rejects_unknown_joint(self):
        """
        Test that only the four goal joints are accepted.
        """
        with self.assertRaises(ValidationError):
            KeyjointGoal("head", (0.0, 0.0, 1.0), np.eye(3))

    def test_transform_is_homogeneous(self):
        """
        Test that the transform carries position and rotation.
        """
        goal = KeyjointGoal(GoalJoint.HIP, (1.0, 2.0, 3.0), np.eye(3))
        np.testing.assert_allclose(goal.transform[:3, 3], [1.0, 2.0, 3.0])
        np.testing.assert_allclose(goal.transform[3], [0.0, 0.0, 0.0, 1.0])

    def test_dict_carries_transform(self):
        """
        Test that the serialized goal lists its 4x4 transform and restores.
        """
        goal = KeyjointGoal(GoalJoint.LEFT_HAND, (0.1, 0.2, 0.3), np.eye(3), "grasp", True, 1.5)
        data = goal.to_dict()
        self.assertEqual(len(data["transform"]), 4)
        restored = KeyjointGoal.from_dict(data)
        np.testing.assert_allclose(restored.position, goal.position)
        self.assertTrue(restored.contact)
        self.assertEqual(restored.time, 1.5)


class StandingGoalsTest(SimpleTestCase):
    """
    Unit tests for standing_goals and reaching_goals.
    """

    def test_layout(self):
        """
        Test that the root is on the ground, the hip above it and the idle
        hands on either side of the hip.
        """
        goals = standing_goals((1.0, 2.0), (0.0, 1.0))
        root = goal_for(goals, GoalJoint.ROOT)
        hip = goal_for(goals, GoalJoint.HIP)
        left = goal_for(goals, GoalJoint.LEFT_HAND)
        right = goal_for(goals, GoalJoint.RIGHT_HAND)
        np.testing.assert_allclose(root.position, [1.0, 2.0, 0.0])
        np.testing.assert_allclose(hip.position, [1.0, 2.0, BodyConfig.HIP_HEIGHT])
        # Facing +y, the left side is -x.
        self.assertLess(left.position[0], 1.0)
        self.assertGreater(right.position[0], 1.0)
        np.testing.assert_allclose(hip.rotation[:, 0], [0.0, 1.0, 0.0], atol=1e-12)
        self.assertFalse(any(goal.contact for goal in goals))

    def test_reaching_hand_in_contact(self):
        """
        Test that the reaching hand sits on the contact point, flagged as
        in contact, with the body standing back along the approach.
        """
        contact = np.array([0.0, 0.0, 1.0])
        goals = reaching_goals(contact, (1.0, 0.0, 0.0), "right")
        hand = goal_for(goals, GoalJoint.RIGHT_HAND)
        root = goal_for(goals, GoalJoint.ROOT)
        np.testing.assert_allclose(hand.position, contact)
        self.assertTrue(hand.contact)
        self.assertFalse(goal_for(goals, GoalJoint.LEFT_HAND).contact)
        self.assertAlmostEqual(root.position[0], BodyConfig.STAND_OFF)
        self.assertEqual(root.position[2], 0.0)
        np.testing.assert_allclose(root.rotation[:2, 0], [-1.0, 0.0], atol=1e-12)

    def test_transforms_by_joint(self):
        """
        Test that goal_transforms maps every joint to its transform.
        """
        transforms = goal_transforms(standing_goals((0.0, 0.0), (1.0, 0.0)))
        self.assertEqual(set(transforms), set(GoalJoint.values))
