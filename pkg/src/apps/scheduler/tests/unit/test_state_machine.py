"""Unit tests for the synthesis state machine."""

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.scheduler.constants import GoalJoint, MachineEvent, MachineState
from src.apps.scheduler.matching import MatchDatabase, keyframe_entries
from src.apps.scheduler.navigation import BodyPose, build_navigation_database
from src.apps.scheduler.state_machine import (
    SynthesisMachine,
    blocking_obstacles,
    plan_tasks,
    run_to_completion,
    step_state_machine,
)
from src.tests.helpers.scenes import blocked_target_scene, closed_cabinet_scene, lone_target_scene, straight_demo


def start_pose():
    return BodyPose((2.0, 0.5), (-1.0, 0.0))


class TaskPlanningTest(SimpleTestCase):
    """
    Unit tests for auxiliary task detection.
    """

    def test_free_target_needs_nothing(self):
        """
        Test that a lone object only needs the approach task.
        """
        tasks = plan_tasks(lone_target_scene(center=(0.0, 0.0, 1.0)))
        self.assertEqual([task.state for task in tasks], [MachineState.APPROACH])

    def test_front_board_blocks(self):
        """
        Test that a board on the way out is reported as a blocker.
        """
        self.assertEqual(blocking_obstacles(blocked_target_scene()), ["board"])

    def test_closed_door_opened_first(self):
        """
        Test that a closed door is opened before the approach and is not
        mistaken for a blocker.
        """
        tasks = plan_tasks(closed_cabinet_scene())
        self.assertEqual(
            [(task.state, task.object_id) for task in tasks],
            [(MachineState.OPEN_CONTAINER, "door"), (MachineState.APPROACH, "target")],
        )


class SynthesisMachineTest(SimpleTestCase):
    """
    Unit tests for SynthesisMachine transitions.
    """

    def assert_well_formed(self, steps):
        for step in steps:
            if step.state == MachineState.CARRY:
                self.assertEqual(step.event, MachineEvent.CONTACT_REACHED)
            if step.state == MachineState.NAVIGATE:
                self.assertTrue(step.goals)
                self.assertTrue(all(goal.joint in (GoalJoint.ROOT, GoalJoint.HIP) for goal in step.goals))
            self.assertIsNone(step.diagnostic)

    def test_free_standing_object(self):
        """
        Test that fetching a free-standing object goes through navigation,
        approach, carry and place only.
        """
        machine = SynthesisMachine(lone_target_scene(center=(0.0, 0.0, 1.0)), start_pose())
        steps = run_to_completion(machine)
        self.assertEqual(
            [step.state for step in steps],
            [MachineState.NAVIGATE, MachineState.APPROACH, MachineState.CARRY, MachineState.PLACE, MachineState.IDLE],
        )
        self.assert_well_formed(steps)
        approach = steps[1].goals
        self.assertTrue(any(goal.contact for goal in approach))

    def test_closed_door(self):
        """
        Test that the door is opened before the object is approached.
        """
        steps = run_to_completion(SynthesisMachine(closed_cabinet_scene(), start_pose()))
        states = [step.state for step in steps]
        self.assertIn(MachineState.OPEN_CONTAINER, states)
        self.assertLess(states.index(MachineState.OPEN_CONTAINER), states.index(MachineState.APPROACH))
        self.assertEqual(states[-1], MachineState.IDLE)
        self.assert_well_formed(steps)

    def test_blocking_obstacle_removed_first(self):
        """
        Test that the board is grasped, put aside and the object fetched
        afterwards.
        """
        machine = SynthesisMachine(blocked_target_scene(), start_pose())
        steps = run_to_completion(machine)
        states = [step.state for step in steps]
        self.assertEqual(
            states,
            [
                MachineState.NAVIGATE,
                MachineState.REMOVE_OBSTACLE,
                MachineState.PLACE,
                MachineState.APPROACH,
                MachineState.CARRY,
                MachineState.PLACE,
                MachineState.IDLE,
            ],
        )
        self.assert_well_formed(steps)
        self.assertEqual(blocking_obstacles(machine.scene), [])

    def test_with_databases(self):
        """
        Test that matched manipulation goals and walking segments drive
        the same transitions.
        """
        scene = lone_target_scene(center=(0.0, 0.0, 1.0))
        demo = straight_demo((0.3, 0.0, 1.0), (0.04, 0.0, 1.0))
        machine = SynthesisMachine(
            scene,
            start_pose(),
            match_db=MatchDatabase(keyframe_entries(scene, demo)),
            nav_db=build_navigation_database(0, 64),
        )
        steps = run_to_completion(machine)
        self.assertEqual(steps[-1].state, MachineState.IDLE)
        self.assertIsNone(steps[-1].diagnostic)
        self.assertIn(MachineState.CARRY, [step.state for step in steps])

    def test_invalid_event(self):
        """
        Test that events not valid in the current state are rejected.
        """
        machine = SynthesisMachine(lone_target_scene(center=(0.0, 0.0, 1.0)), start_pose())
        with self.assertRaises(ValidationError):
            step_state_machine(machine, MachineEvent.CONTACT_REACHED)
        with self.assertRaises(ValidationError):
            step_state_machine(machine, "jump")

    def test_plan_failed_returns_to_idle(self):
        """
        Test that a failed plan in any state reverts to idle with a
        diagnostic.
        """
        machine = SynthesisMachine(lone_target_scene(center=(0.0, 0.0, 1.0)), start_pose())
        step_state_machine(machine, MachineEvent.OBJECT_CLICKED)
        self.assertEqual(machine.state, MachineState.NAVIGATE)
        step = step_state_machine(machine, MachineEvent.PLAN_FAILED, reason="controller fell over")
        self.assertEqual(step.state, MachineState.IDLE)
        self.assertEqual(step.diagnostic, "controller fell over")
        self.assertEqual(machine.state, MachineState.IDLE)

    def test_unreachable_start(self):
        """
        Test that a character standing inside an obstacle ends in idle
        with a navigation diagnostic.
        """
        machine = SynthesisMachine(blocked_target_scene(), BodyPose((0.15, 0.0), (1.0, 0.0)))
        step = step_state_machine(machine, MachineEvent.OBJECT_CLICKED)
        self.assertEqual(step.state, MachineState.IDLE)
        self.assertTrue(step.diagnostic.startswith("navigation"))
