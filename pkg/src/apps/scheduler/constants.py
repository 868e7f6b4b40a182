"""Constants for the scheduler app."""

from django.db import models


class GoalJoint(models.TextChoices):
    LEFT_HAND = "left_hand", "Left hand"
    RIGHT_HAND = "right_hand", "Right hand"
    HIP = "hip", "Hip"
    ROOT = "root", "Ground-projected root"


HAND_JOINTS = {
    "left": GoalJoint.LEFT_HAND,
    "right": GoalJoint.RIGHT_HAND,
}


class ScheduleMode(models.TextChoices):
    SEQUENTIAL = "sequential", "Sequential"
    CO_TEMPORAL = "co-temporal", "Co-temporal"


class MachineState(models.TextChoices):
    IDLE = "idle", "Idle"
    NAVIGATE = "navigate", "Navigate"
    OPEN_CONTAINER = "open-container", "Open container"
    REMOVE_OBSTACLE = "remove-obstacle", "Remove obstacle"
    APPROACH = "approach", "Approach"
    CARRY = "carry", "Carry"
    PLACE = "place", "Place"


class MachineEvent(models.TextChoices):
    OBJECT_CLICKED = "object-clicked", "Object clicked"
    NAVIGATION_ARRIVED = "navigation-arrived", "Navigation arrived"
    CONTACT_REACHED = "contact-reached", "Contact reached"
    RELEASE_DONE = "release-done", "Release done"
    PLAN_FAILED = "plan-failed", "Plan failed"


class EnvironmentConfig:
    """
    Pooled distance descriptor: an object-centric cube averaged over
    2 x 2 x 4 blocks.
    """
    CUBE_SIZE = 0.8
    SPACING = 0.05
    BLOCKS = (2, 2, 4)


class BodyConfig:
    """
    Standing pose of the synthetic character relative to its root.
    """
    HIP_HEIGHT = 0.95
    STAND_OFF = 0.45
    HAND_SPREAD = 0.2
    IDLE_HAND_DROP = 0.15
    WALKING_SPEED = 1.2
    BODY_WIDTH = 0.4


class MatchConfig:
    K = 4
    SEEDS = range(0, 16)


class NavigationConfig:
    SPACING = 0.05
    BAND = (0.1, 1.8)
    INFLATION = 0.25
    MARGIN = 2.5
    # Radius of the directional cost around the goal.
    GOAL_RADIUS = 0.4
    SEGMENT_LENGTH = 3.0
    SEGMENT_SAMPLES = 5
    CANDIDATES = 8
    DATABASE_SIZE = 256
    STEP_FRACTION = 0.5
    MAX_STEPS_FACTOR = 4


class ScheduleConfig:
    AUXILIARY_WEIGHT = 2.0


class ResolutionConfig:
    MARGIN = 0.01
    MAX_ROUNDS = 8


class ErrorMessages:
    NOT_ROTATION = "Goal {joint}: rotation is not in SO(3)."
    BAD_ENV = "Environment descriptor must be 16 finite values."
    EMPTY_DATABASE = "The database has no entries."
    NO_MATCH = "No database entry for condition {condition}."
    BAD_K = "k must be a positive integer."
    GOAL_BLOCKED = "Goal cell {cell} is occupied."
    START_BLOCKED = "Start cell {cell} is occupied."
    OUTSIDE_GRID = "Point {point} lies outside the navigation grid."
    UNREACHABLE = "The goal cannot be reached from {start}."
    BAD_HEADING = "Goal heading must be a non-zero 2-vector."
    NO_FREE_HAND = "No free hand; put an object down first."
    NO_CANDIDATES = "No candidates for the {hand} hand on the {task} task."
    UNRESOLVED = "Goals {joints} still penetrate after {rounds} rounds."
    BAD_EVENT = "Event {event} is not valid in state {state}."
    BAD_FEATURE = "Navigation feature must have 33 finite values with a unit heading."
