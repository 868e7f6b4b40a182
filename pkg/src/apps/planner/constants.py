"""Constants for the planner app."""

from django.db import models


class Hand(models.TextChoices):
    LEFT = "left", "Left hand"
    RIGHT = "right", "Right hand"


class Action(models.TextChoices):
    GRASP = "grasp", "Grasp"
    PLACE = "place", "Place"


class Segment(models.TextChoices):
    APPROACH = "approach", "Approach"
    LEAVE = "leave", "Leave"


class TrajectoryTolerance:
    ROTATION = 1e-6
    TANGENT = 1e-6
    DUPLICATE_POINT = 1e-12


class ExtractionConfig:
    """
    Start selection and gradient descent settings.
    """
    AVERAGE_WALKING_SPEED = 1.0
    MIN_SPEED = 0.02
    MAX_SPEED = 2.0
    SINK_FACTOR = 2.0
    STEP_LIMIT_FACTOR = 10.0
    MAX_HALVINGS = 8
    DESCENT_TOLERANCE = 1e-6
    STAGNATION_GRADIENT = 1e-9


class BlendConfig:
    BLEND_FRAMES = 8


class AuditConfig:
    CLEARANCE = 0.0
    # Penetration of the carried object tolerated against its support.
    ATTACHED_TOLERANCE = 0.0125
    ATTACHED_SURFACE_SAMPLES = 96


class BaselineConfig:
    STRAIGHT_SPEED = 1.0
    STRAIGHT_SAMPLES = 40


class ErrorMessages:
    NOT_ROTATION = "Frame {index}: rotation is not in SO(3)."
    TANGENT_NOT_UNIT = "Frame {index}: tangent is not unit length."
    TIMES_NOT_INCREASING = "Trajectory timestamps must be strictly increasing."
    CONTACT_OUT_OF_RANGE = "Contact index {index} is outside the trajectory."
    TOO_SHORT = "{name} needs at least {count} samples."
    NO_FINITE_CELL = "The arrival field has no finite cell."
    START_NOT_FINITE = "The start point has no finite arrival time."
    STAGNATION = "Gradient vanished away from the sink at {position}."
    BAD_STEP = "Integration step must be strictly positive."
    BAD_SPEED = "Average walking speed must be strictly positive."
