"""Small scenes and demonstrations shared by the test suites."""

import numpy as np

from src.apps.planner.trajectory import Trajectory6
from src.apps.scene.constants import JointKind, Role, Shape
from src.apps.scene.generator import box_between
from src.apps.scene.grids import Bounds, GridGeometry
from src.apps.scene.solids import Articulation, Scene, Solid


IDENTITY = (1.0, 0.0, 0.0, 0.0)


def sphere(solid_id, center, radius, role=Role.OBSTACLE):
    return Solid(solid_id, Shape.SPHERE, tuple(center), IDENTITY, (radius,), role)


def box(solid_id, center, size, role=Role.OBSTACLE):
    return Solid(solid_id, Shape.BOX, tuple(center), IDENTITY, tuple(size), role)


def lone_target_scene(center=(0.0, 0.0, 0.0), radius=0.04, size=0.8, extra=()):
    """
    A spherical target alone in a cube, optionally with extra solids.
    """
    target = sphere("target", center, radius, Role.TARGET)
    return Scene((target,) + tuple(extra), Bounds.cube(center, size))


def walled_scene():
    """
    Target with a wall 0.15 m in front of it on the +x side, leaving a
    gap above.
    """
    wall = box_between("wall", Role.OBSTACLE, (0.12, -0.25, -0.4), (0.17, 0.25, 0.1))
    return lone_target_scene(extra=(wall,))


def straight_demo(start, end, speed=1.0, spacing=0.00625):
    """
    Constant-speed straight demonstration ending in its contact frame.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    count = max(int(np.ceil(np.linalg.norm(end - start) / spacing)), 1) + 1
    positions = np.linspace(start, end, count)
    return Trajectory6.from_path(positions, np.full(count, speed))


def small_geometry(center=(0.0, 0.0, 0.0), size=0.8, h=0.025):
    return GridGeometry.covering(Bounds.cube(center, size), h)


def closed_cabinet_scene():
    """
    Target resting inside a cabinet open toward +x whose front is shut by
    a hinged door.
    """
    t = 0.02
    boards = (
        box_between("floor", Role.CONTAINER_SHELL, (-0.42, -0.42, 0.88), (0.0, 0.42, 0.9)),
        box_between("top", Role.CONTAINER_SHELL, (-0.42, -0.42, 1.3), (0.0, 0.42, 1.32)),
        box_between("left", Role.CONTAINER_SHELL, (-0.42, -0.42, 0.9), (0.0, -0.4, 1.3)),
        box_between("right", Role.CONTAINER_SHELL, (-0.42, 0.4, 0.9), (0.0, 0.42, 1.3)),
        box_between("back", Role.CONTAINER_SHELL, (-0.42, -0.4, 0.9), (-0.4, 0.4, 1.3)),
    )
    hinge = Articulation((0.0, 0.0, 1.0), JointKind.HINGE, (0.0, 0.5 * np.pi), 0.0, (0.5 * t, 0.42, 0.9))
    door = Solid("door", Shape.ORIENTED_BOX, (0.5 * t, 0.0, 1.1), IDENTITY, (t, 0.84, 0.44), Role.DOOR, hinge)
    target = sphere("target", (-0.2, 0.0, 0.94), 0.04, Role.TARGET)
    return Scene((target, door) + boards, Bounds.cube(target.center, 0.8))


def blocked_target_scene():
    """
    Free-standing target at table height with a board right in front of
    it on the +x side.
    """
    board = box("board", (0.15, 0.0, 1.0), (0.05, 0.3, 0.2))
    return lone_target_scene(center=(0.0, 0.0, 1.0), extra=(board,))
