"""
Synthesis state machine coordinating navigation and manipulation tasks.

A click on an object queues the tasks needed to fetch it: opening closed
doors and drawers, removing obstacles that keep the object from being
taken out, and finally approaching it. Each transition emits the goal
batch for the new state; the character controller answers with events.
"""

import logging
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.exceptions import DomainFailure, MatchFailure, NavigationFailure
from src.apps.planner.audit import audit_collision
from src.apps.planner.constants import Action, Segment
from src.apps.planner.trajectory import ConditionVector, Trajectory6
from src.apps.scene.constants import Role

from .bimanual import schedule_bimanual
from .constants import (
    HAND_JOINTS,
    BodyConfig,
    ErrorMessages,
    GoalJoint,
    MachineEvent,
    MachineState,
    MatchConfig,
    NavigationConfig,
    ScheduleMode,
)
from .environment import encode_environment
from .goals import goal_for, reaching_goals, standing_goals
from .matching import MatchFeature, match_goal
from .navigation import BodyPose, match_navigation, occupancy_from_scene, plan_2d_path
from .resolution import resolve_goal_collision


logger = logging.getLogger(__name__)

BODY_JOINTS = (GoalJoint.ROOT, GoalJoint.HIP)
LEAVE_SAMPLES = 48
CARRY_DISTANCE = 1.0
PLACE_ASIDE = 0.6

TRANSITIONS = {
    MachineState.IDLE: {MachineEvent.OBJECT_CLICKED},
    MachineState.NAVIGATE: {MachineEvent.NAVIGATION_ARRIVED},
    MachineState.OPEN_CONTAINER: {MachineEvent.CONTACT_REACHED},
    MachineState.REMOVE_OBSTACLE: {MachineEvent.CONTACT_REACHED},
    MachineState.APPROACH: {MachineEvent.CONTACT_REACHED},
    MachineState.CARRY: {MachineEvent.NAVIGATION_ARRIVED},
    MachineState.PLACE: {MachineEvent.RELEASE_DONE},
}


@dataclass(frozen=True)
class Task:
    state: str
    object_id: str


@dataclass(frozen=True)
class Step:
    """
    State entered by one event and the goals it emits.
    """
    state: str
    event: str
    goals: tuple = ()
    diagnostic: str = None
    failure: Exception = field(default=None, compare=False, repr=False)

    def to_dict(self):
        data = {"state": str(self.state), "event": str(self.event), "goals": [goal.to_dict() for goal in self.goals]}
        if self.diagnostic:
            data["diagnostic"] = self.diagnostic
        return data


def horizontal(direction, fallback=(1.0, 0.0)):
    flat = np.asarray(direction, dtype=float)[:2]
    norm = np.linalg.norm(flat)
    if norm < 1e-6:
        flat = np.asarray(fallback, dtype=float)
        norm = np.linalg.norm(flat)
    return flat / norm


def leave_path(scene, samples=LEAVE_SAMPLES, lift=0.005):
    """
    Straight carrying path from the target center out of its container
    along the opening direction, contact at the first frame.
    """
    target = scene.target
    direction = scene.opening_direction(target.id)
    reach = 0.5 * float(np.linalg.norm(scene.bounds.extent)) + target.bounding_radius
    start = target.center + [0.0, 0.0, lift]
    positions = start + np.linspace(0.0, reach, samples)[:, None] * direction
    return Trajectory6.from_path(positions, np.ones(samples), contact_index=0)


def blocking_obstacles(scene):
    """
    Obstacles that have to be removed, in removal order, before the
    target can be carried out of its container. Doors and drawers are
    left out since they are opened instead.
    """
    working = scene
    for solid in scene.solids:
        if solid.role in (Role.DOOR, Role.DRAWER):
            working = working.without(solid.id)
    blockers = []
    while True:
        report = audit_collision(leave_path(working), working, carrying=True)
        if report.collision_free:
            return blockers
        solid = working.solid(report.offending_solid)
        if solid.role != Role.OBSTACLE:
            logger.info("Leave path blocked by fixed solid %s", solid.id)
            return blockers
        blockers.append(solid.id)
        working = working.without(solid.id)


def plan_tasks(scene):
    tasks = [Task(MachineState.OPEN_CONTAINER, solid.id) for solid in scene.closed_articulations()]
    tasks += [Task(MachineState.REMOVE_OBSTACLE, solid_id) for solid_id in blocking_obstacles(scene)]
    tasks.append(Task(MachineState.APPROACH, scene.target.id))
    return tasks


def free_stand_point(grid, point, direction, reach=2.0):
    """
    First free cell walking out from ``point`` along ``direction``.
    """
    for distance in np.arange(0.0, reach, grid.spacing):
        candidate = np.asarray(point) + distance * np.asarray(direction)
        if grid.is_free(candidate):
            return candidate
    raise NavigationFailure(ErrorMessages.GOAL_BLOCKED.format(cell=grid.cell_of(point)))


class SynthesisMachine:
    """
    Single-character state machine over a scene. ``match_db`` and
    ``nav_db`` are optional; without them manipulation goals come from
    the standing reach layout and navigation goals from the path
    segments directly.
    """

    def __init__(self, scene, pose, match_db=None, nav_db=None, hands=("left", "right"),
                 k=MatchConfig.K):
        self.scene = scene
        self.pose = pose
        self.match_db = match_db
        self.nav_db = nav_db
        self.hands = tuple(hands)
        self.k = k
        self.state = MachineState.IDLE
        self.tasks = deque()
        self.task = None
        self.holding = {}
        self.schedule = None
        self.arrival = None
        self._spot = None
        self.history = []

    @property
    def free_hands(self):
        return {hand for hand in self.hands if hand not in self.holding}

    def step(self, event, **payload):
        if event not in MachineEvent.values:
            raise ValidationError(ErrorMessages.BAD_EVENT.format(event=event, state=self.state))
        if event == MachineEvent.PLAN_FAILED:
            return self._fail(event, payload.get("reason", "plan failed"))
        if event not in TRANSITIONS[self.state]:
            raise ValidationError(ErrorMessages.BAD_EVENT.format(event=event, state=self.state))
        handler = {
            MachineEvent.OBJECT_CLICKED: self._clicked,
            MachineEvent.NAVIGATION_ARRIVED: self._arrived,
            MachineEvent.CONTACT_REACHED: self._contact,
            MachineEvent.RELEASE_DONE: self._released,
        }[event]
        try:
            state, goals = handler(**payload) if event == MachineEvent.OBJECT_CLICKED else handler()
        except DomainFailure as failure:
            return self._fail(event, failure.diagnostic(), failure)
        self.state = state
        step = Step(state, event, tuple(goals))
        self.history.append(step)
        logger.debug("%s -> %s with %d goals", event, state, len(step.goals))
        return step

    def _fail(self, event, diagnostic, failure=None):
        logger.info("Back to idle from %s: %s", self.state, diagnostic)
        self.state = MachineState.IDLE
        self.tasks.clear()
        self.task = None
        self.schedule = None
        step = Step(MachineState.IDLE, event, (), diagnostic, failure)
        self.history.append(step)
        return step

    def _clicked(self, object_id=None):
        object_id = object_id or self.scene.target.id
        if object_id != self.scene.target.id:
            self.scene = self.scene.retargeted(object_id)
        self.tasks = deque(plan_tasks(self.scene))
        logger.info("Tasks for %s: %s", object_id, [f"{t.state}:{t.object_id}" for t in self.tasks])
        return self._next_task()

    def _next_task(self):
        self.task = self.tasks.popleft()
        stand, heading = self._stand_for(self.task.object_id)
        if np.linalg.norm(stand - self.pose.root) < NavigationConfig.GOAL_RADIUS:
            self.pose = BodyPose(self.pose.root, heading)
            return self.task.state, self._manipulation_goals()
        goals = self._navigation_goals(stand, heading)
        return MachineState.NAVIGATE, goals

    def _approach_direction(self, object_id):
        opening = self.scene.opening_direction(self.scene.target.id)
        center = self.scene.solid(object_id).center
        return horizontal(opening, fallback=self.pose.root - center[:2])

    def _stand_for(self, object_id):
        approach = self._approach_direction(object_id)
        center = self.scene.solid(object_id).center
        return center[:2] + BodyConfig.STAND_OFF * approach, -approach

    def _navigation_goals(self, stand, heading):
        grid = occupancy_from_scene(self.scene)
        goal = free_stand_point(grid, stand, -heading)
        path = plan_2d_path(grid, self.pose.root, goal, heading)
        self.arrival = BodyPose(goal, heading)
        if self.nav_db is not None:
            match = match_navigation(self.nav_db, path.points, self.pose, self.scene)
            goals = [goal for batch in match.goals for goal in batch]
        else:
            goals = standing_goals(goal, heading, time=path.length / BodyConfig.WALKING_SPEED)
        return tuple(g for g in goals if g.joint in BODY_JOINTS)

    def _candidates(self, object_id, hand):
        solid = self.scene.solid(object_id)
        approach = self._approach_direction(object_id)
        if self.match_db is not None:
            query = MatchFeature(
                encode_environment(self.scene, object_id),
                ConditionVector(float(solid.center[2]), hand, Action.GRASP, Segment.APPROACH),
            )
            try:
                return [c.goals_at(solid.center) for c in match_goal(self.match_db, query, self.k)]
            except MatchFailure as failure:
                logger.info("Falling back to reach layout: %s", failure.diagnostic())
        return [reaching_goals(solid.center, approach, hand)]

    def _manipulation_goals(self):
        task = self.task
        pending = self.tasks[0] if self.tasks else None
        free = self.free_hands
        if task.state == MachineState.APPROACH and self.schedule is not None:
            keyframe = self.schedule.keyframes[-1]
            self.schedule = None
        elif task.state == MachineState.OPEN_CONTAINER and pending and pending.state == MachineState.APPROACH:
            targets = {hand: self._candidates(pending.object_id, hand) for hand in free}
            doors = {hand: self._candidates(task.object_id, hand) for hand in free}
            schedule = schedule_bimanual(targets, doors, self.pose.goals, free)
            self.schedule = schedule if schedule.mode == ScheduleMode.CO_TEMPORAL else None
            keyframe = schedule.keyframes[0]
        else:
            targets = {hand: self._candidates(task.object_id, hand) for hand in free}
            keyframe = schedule_bimanual(targets, None, self.pose.goals, free).keyframes[0]
        resolved = resolve_goal_collision(keyframe, self.scene).goals
        self.pose = replace(self.pose, goals=resolved)
        return resolved

    def _contact_hand(self, goals):
        for hand, joint in HAND_JOINTS.items():
            if hand not in self.holding and goal_for(goals, joint).contact:
                return hand
        return next(iter(sorted(self.free_hands)))

    def _arrived(self):
        if self.state == MachineState.CARRY:
            self.pose = self.arrival
            return MachineState.PLACE, self._place_goals()
        self.pose = self.arrival
        return self.task.state, self._manipulation_goals()

    def _contact(self):
        task = self.task
        hand = self._contact_hand(self.pose.goals)
        if task.state == MachineState.OPEN_CONTAINER:
            solid = self.scene.solid(task.object_id)
            self.scene = self.scene.replacing(solid.at_articulation(solid.articulation.range[1]))
            if self.schedule is not None:
                self.holding[hand] = task.object_id
            return self._next_task()
        self.holding[hand] = task.object_id
        if task.state == MachineState.REMOVE_OBSTACLE:
            return MachineState.PLACE, self._place_goals()
        return MachineState.CARRY, self._carry_goals(hand)

    def _carry_goals(self, hand):
        heading = -self.pose.heading
        destination = self.pose.root + CARRY_DISTANCE * heading
        grid = occupancy_from_scene(self.scene)
        destination = free_stand_point(grid, destination, heading)
        plan_2d_path(grid, self.pose.root, destination, heading)
        self.arrival = BodyPose(destination, heading)
        holding = standing_goals(destination, heading)
        hip = goal_for(holding, GoalJoint.HIP)
        carried = hip.position + 0.3 * np.append(heading, 0.0)
        return standing_goals(destination, heading, hand, carried, action=Action.GRASP)

    def _place_goals(self):
        object_id = self._carried()
        solid = self.scene.solid(object_id)
        if object_id == self.scene.target.id:
            spot = np.append(self.pose.root + 0.4 * self.pose.heading, 0.5 * BodyConfig.HIP_HEIGHT)
        else:
            left = np.array([-self.pose.heading[1], self.pose.heading[0]])
            spot = np.append(self.pose.root + PLACE_ASIDE * left, solid.center[2] - solid.aabb().lo[2])
        self._spot = spot
        hand = next(h for h, held in self.holding.items() if held == object_id)
        return standing_goals(self.pose.root, self.pose.heading, hand, spot, action=Action.PLACE)

    def _carried(self):
        task_object = self.task.object_id
        if task_object not in self.holding.values():
            raise ValidationError(ErrorMessages.BAD_EVENT.format(event=MachineEvent.RELEASE_DONE, state=self.state))
        return task_object

    def _released(self):
        object_id = self._carried()
        hand = next(h for h, held in self.holding.items() if held == object_id)
        del self.holding[hand]
        if object_id == self.scene.target.id:
            self.holding.clear()
            self.task = None
            return MachineState.IDLE, ()
        solid = self.scene.solid(object_id)
        self.scene = self.scene.replacing(replace(solid, position=tuple(self._spot)))
        # Replan: removing one obstacle can expose the next.
        self.tasks = deque(plan_tasks(self.scene))
        return self._next_task()


def step_state_machine(machine, event, **payload):
    return machine.step(event, **payload)


AUTOMATIC_EVENTS = {
    MachineState.NAVIGATE: MachineEvent.NAVIGATION_ARRIVED,
    MachineState.OPEN_CONTAINER: MachineEvent.CONTACT_REACHED,
    MachineState.REMOVE_OBSTACLE: MachineEvent.CONTACT_REACHED,
    MachineState.APPROACH: MachineEvent.CONTACT_REACHED,
    MachineState.CARRY: MachineEvent.NAVIGATION_ARRIVED,
    MachineState.PLACE: MachineEvent.RELEASE_DONE,
}


def run_to_completion(machine, object_id=None, max_steps=64):
    """
    Click ``object_id`` and answer every state with the event that ends
    it, as a controller that always succeeds would. Returns the steps.
    """
    steps = [machine.step(MachineEvent.OBJECT_CLICKED, object_id=object_id)]
    while machine.state != MachineState.IDLE and len(steps) < max_steps:
        steps.append(machine.step(AUTOMATIC_EVENTS[machine.state]))
    return steps
