"""Unit tests for solids, scenes and exact distance queries."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.spatial.transform import Rotation

from src.apps.common.rotations import matrix_to_quat
from src.apps.scene.constants import JointKind, Role, Shape
from src.apps.scene.grids import Bounds
from src.apps.scene.solids import (
    Articulation,
    Scene,
    Solid,
    closest_surface_point,
    contains,
    gradient_of_distance,
    signed_distance,
    unsigned_distance,
)
from src.tests.helpers.scenes import IDENTITY, box, sphere


class SolidValidationTest(SimpleTestCase):
    """
    Unit tests for the Solid input contract.
    """

    def test_rejects_non_unit_quaternion(self):
        """
        Test that a quaternion off unit norm by more than 1e-9 is rejected.
        """
        with self.assertRaises(ValidationError):
            Solid("a", Shape.SPHERE, (0, 0, 0), (1.0 + 1e-6, 0, 0, 0), (1.0,), Role.OBSTACLE)

    def test_rejects_non_positive_extent(self):
        """
        Test that a zero extent is rejected.
        """
        with self.assertRaises(ValidationError):
            box("a", (0, 0, 0), (1.0, 0.0, 1.0))

    def test_rejects_articulation_on_obstacle(self):
        """
        Test that only doors and drawers may carry an articulation.
        """
        joint = Articulation((0, 0, 1), JointKind.HINGE, (0.0, 1.0))
        with self.assertRaises(ValidationError):
            Solid("a", Shape.BOX, (0, 0, 0), IDENTITY, (1, 1, 1), Role.OBSTACLE, joint)

    def test_accepts_articulated_door(self):
        """
        Test that a door with a hinge is accepted and starts closed.
        """
        joint = Articulation((0, 0, 1), JointKind.HINGE, (0.0, 1.0))
        door = Solid("d", Shape.ORIENTED_BOX, (0, 0, 0), IDENTITY, (0.02, 0.4, 0.4), Role.DOOR, joint)
        self.assertTrue(door.articulation.is_closed)

    def test_hinge_rotates_about_pivot(self):
        """
        Test that opening a hinged panel by 90 degrees swings it about the
        pivot and records the new joint value.
        """
        joint = Articulation((0, 0, 1), JointKind.HINGE, (0.0, np.pi / 2), pivot=(0.0, 0.2, 0.0))
        door = Solid("d", Shape.ORIENTED_BOX, (0, 0, 0), IDENTITY, (0.02, 0.4, 0.4), Role.DOOR, joint)
        opened = door.at_articulation(np.pi / 2)
        np.testing.assert_allclose(opened.position, (0.2, 0.2, 0.0), atol=1e-12)
        self.assertFalse(opened.articulation.is_closed)


class SceneValidationTest(SimpleTestCase):
    """
    Unit tests for the Scene invariants.
    """

    def test_requires_exactly_one_target(self):
        """
        Test that scenes without a target or with two targets are rejected.
        """
        bounds = Bounds((-1, -1, -1), (1, 1, 1))
        with self.assertRaises(ValidationError):
            Scene((sphere("a", (0, 0, 0), 0.1),), bounds)
        with self.assertRaises(ValidationError):
            Scene((sphere("a", (0, 0, 0), 0.1, Role.TARGET), sphere("b", (0.5, 0, 0), 0.1, Role.TARGET)), bounds)

    def test_rejects_duplicate_ids(self):
        """
        Test that two solids sharing an id are rejected.
        """
        bounds = Bounds((-1, -1, -1), (1, 1, 1))
        with self.assertRaises(ValidationError):
            Scene((sphere("a", (0, 0, 0), 0.1, Role.TARGET), sphere("a", (0.5, 0, 0), 0.1)), bounds)

    def test_dict_round_trip_preserves_solids(self):
        """
        Test that a scene rebuilt from its dict equals the original.
        """
        joint = Articulation((0, 0, 1), JointKind.HINGE, (0.0, 1.0), value=0.5, pivot=(0, 0.2, 0))
        door = Solid("d", Shape.ORIENTED_BOX, (0.3, 0, 0), IDENTITY, (0.02, 0.4, 0.4), Role.DOOR, joint)
        scene = Scene((sphere("t", (0, 0, 0), 0.05, Role.TARGET), door), Bounds((-1, -1, -1), (1, 1, 1)))
        self.assertEqual(Scene.from_dict(scene.to_dict()), scene)

    def test_opening_direction_of_open_front_box(self):
        """
        Test that a ray from a target inside a box open on +y leaves along +y.
        """
        walls = (
            box("floor", (0, 0, -0.21), (0.44, 0.44, 0.02), Role.CONTAINER_SHELL),
            box("top", (0, 0, 0.21), (0.44, 0.44, 0.02), Role.CONTAINER_SHELL),
            box("px", (0.21, 0, 0), (0.02, 0.44, 0.4), Role.CONTAINER_SHELL),
            box("nx", (-0.21, 0, 0), (0.02, 0.44, 0.4), Role.CONTAINER_SHELL),
            box("ny", (0, -0.21, 0), (0.4, 0.02, 0.4), Role.CONTAINER_SHELL),
        )
        scene = Scene((sphere("t", (0, 0, 0), 0.05, Role.TARGET),) + walls, Bounds((-1, -1, -1), (1, 1, 1)))
        np.testing.assert_array_equal(scene.opening_direction(), (0.0, 1.0, 0.0))


class UnsignedDistanceTest(SimpleTestCase):
    """
    Unit tests for unsigned_distance and related queries.
    """

    def test_interior_point_is_zero(self):
        """
        Test that the center of a unit box is at distance 0.
        """
        self.assertEqual(unsigned_distance(np.zeros(3), [box("b", (0, 0, 0), (1, 1, 1))]), 0.0)

    def test_sphere_analytic(self):
        """
        Test that (2, 0, 0) lies 1 m from a unit sphere at the origin.
        """
        self.assertAlmostEqual(unsigned_distance(np.array([2.0, 0, 0]), [sphere("s", (0, 0, 0), 1.0)]), 1.0)

    def test_rotated_box_matches_surface_sampling(self):
        """
        Test that the distance to a box rotated 45 degrees about z agrees
        with the minimum over densely sampled surface points.
        """
        rotation = Rotation.from_euler("z", 45, degrees=True).as_matrix()
        solid = Solid("b", Shape.ORIENTED_BOX, (0.1, -0.2, 0.05), tuple(matrix_to_quat(rotation)),
                      (0.4, 0.2, 0.3), Role.OBSTACLE)
        rng = np.random.default_rng(3)
        half = 0.5 * np.asarray(solid.dims)
        faces = []
        per_face = 17000
        for axis in range(3):
            for sign in (-1.0, 1.0):
                samples = rng.uniform(-half, half, size=(per_face, 3))
                samples[:, axis] = sign * half[axis]
                faces.append(samples)
        surface = solid.to_world(np.vstack(faces))
        local_queries = np.array([[0.5, 0.03, -0.05], [-0.1, -0.4, 0.1], [0.05, 0.02, 0.45]])
        for query in solid.to_world(local_queries):
            oracle = np.min(np.linalg.norm(surface - query, axis=1))
            self.assertAlmostEqual(unsigned_distance(query, [solid]), oracle, delta=1e-4)

    def test_one_lipschitz(self):
        """
        Test that distance differences never exceed point separation.
        """
        solids = [sphere("s", (0, 0, 0), 0.2), box("b", (0.5, 0.1, 0), (0.2, 0.3, 0.1))]
        rng = np.random.default_rng(7)
        a = rng.uniform(-1, 1, size=(500, 3))
        b = a + rng.normal(scale=0.05, size=a.shape)
        gap = np.abs(unsigned_distance(a, solids) - unsigned_distance(b, solids))
        self.assertTrue(np.all(gap <= np.linalg.norm(a - b, axis=1) + 1e-12))

    def test_surface_counts_as_inside(self):
        """
        Test that a point exactly on a box face is inside.
        """
        self.assertTrue(contains(np.array([0.5, 0.0, 0.0]), box("b", (0, 0, 0), (1, 1, 1))))

    def test_requires_solids(self):
        """
        Test that an empty solid set is rejected.
        """
        with self.assertRaises(ValidationError):
            unsigned_distance(np.zeros(3), [])


class ClosestSurfacePointTest(SimpleTestCase):
    """
    Unit tests for closest_surface_point and gradient_of_distance.
    """

    def test_closest_point_lies_on_surface(self):
        """
        Test that projections of random points onto each shape have zero
        signed distance and realize the unsigned distance.
        """
        rotation = Rotation.from_euler("xyz", (20, 30, 40), degrees=True).as_matrix()
        solids = [
            sphere("s", (0.1, 0, 0), 0.3),
            box("b", (0, 0.2, 0), (0.3, 0.2, 0.4)),
            Solid("o", Shape.ORIENTED_BOX, (0, 0, 0.1), tuple(matrix_to_quat(rotation)), (0.3, 0.2, 0.1), Role.OBSTACLE),
            Solid("c", Shape.CYLINDER, (0, 0, 0), IDENTITY, (0.15, 0.4), Role.OBSTACLE),
        ]
        points = np.random.default_rng(11).uniform(-0.6, 0.6, size=(200, 3))
        for solid in solids:
            surface = closest_surface_point(points, solid)
            np.testing.assert_allclose(signed_distance(surface, solid), 0.0, atol=1e-9)
            np.testing.assert_allclose(
                np.linalg.norm(surface - points, axis=1), np.abs(signed_distance(points, solid)), atol=1e-9
            )

    def test_gradient_points_out_of_box_face(self):
        """
        Test that inside a box near its +x face the distance gradient is +x.
        """
        direction = gradient_of_distance([0.45, 0.0, 0.0], [box("b", (0, 0, 0), (1, 1, 1))])
        np.testing.assert_allclose(direction, (1.0, 0.0, 0.0), atol=1e-6)
