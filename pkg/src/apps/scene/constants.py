"""Constants for the scene app."""

from django.db import models


class Shape(models.TextChoices):
    BOX = "box", "Axis-aligned box"
    ORIENTED_BOX = "oriented-box", "Oriented box"
    SPHERE = "sphere", "Sphere"
    CYLINDER = "cylinder", "Vertical cylinder"


class Role(models.TextChoices):
    TARGET = "target", "Target"
    OBSTACLE = "obstacle", "Obstacle"
    CONTAINER_SHELL = "container-shell", "Container shell"
    DOOR = "door", "Door"
    DRAWER = "drawer", "Drawer"


class JointKind(models.TextChoices):
    HINGE = "hinge", "Hinge"
    PRISMATIC = "prismatic", "Prismatic"


class Archetype(models.TextChoices):
    SHELF = "shelf", "Open shelf"
    CABINET = "cabinet-with-door", "Cabinet with hinged door"
    DRAWER = "drawer", "Pulled-out drawer"
    OPEN = "open", "Free-standing support"


ARTICULATED_ROLES = (Role.DOOR, Role.DRAWER)

SHAPE_DIMENSIONS = {
    Shape.BOX: 3,
    Shape.ORIENTED_BOX: 3,
    Shape.SPHERE: 1,
    Shape.CYLINDER: 2,
}


class GridConfig:
    """
    Voxel grid defaults.
    """
    SPACING = 0.025
    CUBE_SIZE = 0.8


class SolidTolerance:
    """
    Numerical tolerances on solid descriptions.
    """
    QUATERNION_NORM = 1e-9
    ARTICULATION_AXIS_NORM = 1e-6
    GRADIENT_STEP = 1e-5


class GeneratorConfig:
    """
    Procedural layout constants.
    """
    MAX_ATTEMPTS = 64

    # 29.5 cm quoted for the 80% narrow shelf.
    BASE_INTERIOR_WIDTH = 0.36875
    BASE_INTERIOR_DEPTH = 0.30
    BASE_INTERIOR_HEIGHT = 0.30
    BOARD_THICKNESS = 0.02

    SCALE_RANGE = (0.8, 1.2)
    RESHAPE_RANGE = (0.7, 1.5)
    OBSTACLE_COUNT = 2
    PLACEMENT_HEIGHT_RANGE = (0.4, 1.4)

    TARGET_RADIUS_RANGE = (0.03, 0.04)
    TARGET_HEIGHT_RANGE = (0.10, 0.14)
    TARGET_DEPTH_FRACTION = 0.65

    DRAWER_WALL_HEIGHT = 0.08
    DRAWER_PULL = 0.25

    PLACEMENT_GAP = 0.015
    START_CLEARANCE = 0.04
    START_MARGIN = 0.05


class DemonstrationConfig:
    """
    Synthetic demonstration trajectory constants.
    """
    CLEARANCE_REFERENCE = 0.1
    CRUISE_SPEED = 1.0
    CONTACT_SPEED = 0.2
    SLOWDOWN_DISTANCE = 0.15
    SMOOTHING_PASSES = 4


class ErrorMessages:
    """
    Validation and failure messages.
    """
    QUATERNION_NOT_UNIT = "Solid {id}: quaternion must have unit norm."
    EXTENTS_NOT_POSITIVE = "Solid {id}: all extents must be strictly positive."
    WRONG_DIMENSION_COUNT = "Solid {id}: shape {shape} expects {count} dimensions."
    AXIS_ALIGNED_ROTATED = "Solid {id}: axis-aligned boxes cannot be rotated."
    ARTICULATION_ROLE = "Solid {id}: articulation is only allowed on doors and drawers."
    ARTICULATION_RANGE = "Solid {id}: articulation range must satisfy lo <= value <= hi."
    ARTICULATION_AXIS = "Solid {id}: articulation axis must be a unit vector."
    TARGET_COUNT = "A scene needs exactly one target solid, found {count}."
    DUPLICATE_ID = "Solid id {id} is used more than once."
    UNKNOWN_SOLID = "No solid with id {id} in the scene."
    EMPTY_REGION = "Region must have positive volume."
    REGION_TOO_SMALL = "Region is too small to contain a single cell of spacing {h}."
    BAD_SPACING = "Grid spacing must be strictly positive."
    NO_SOLIDS = "Distance queries need at least one solid."
    BAD_MAGIC = "Not a {format} file."
    UNSUPPORTED_VERSION = "Unsupported {format} version {version}."
    TRUNCATED = "{format} payload is truncated."
    GENERATION_EXHAUSTED = "No reachable layout after {attempts} attempts (seed {seed})."
