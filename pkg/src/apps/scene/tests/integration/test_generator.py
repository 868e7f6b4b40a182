"""Integration tests for procedural scene and demonstration generation."""

from django.test import SimpleTestCase

from src.apps.common.artifacts import canonical_json
from src.apps.common.exceptions import GenerationFailure
from src.apps.scene.constants import Archetype, GeneratorConfig, Role
from src.apps.scene.generator import GeneratorParams, generate_scene
from src.apps.scene.grids import GridGeometry
from src.apps.scene.solids import contains, unsigned_distance
from src.apps.scene.voxels import occupancy_mask


class GenerateSceneTest(SimpleTestCase):
    """
    Integration tests for generate_scene.
    """

    def test_same_seed_same_scene(self):
        """
        Test that two generations from one seed serialize identically.
        """
        first, first_demo = generate_scene(7)
        second, second_demo = generate_scene(7)
        self.assertEqual(canonical_json(first.to_dict()), canonical_json(second.to_dict()))
        self.assertEqual(canonical_json(first_demo.to_dict()), canonical_json(second_demo.to_dict()))

    def test_scaled_shelf_width(self):
        """
        Test that a shelf at scale 0.8 has 0.8 times the base interior width
        between its side boards.
        """
        scene, _ = generate_scene(3, GeneratorParams(archetype=Archetype.SHELF, scale=0.8))
        left = scene.solid("shelf-left").aabb()
        right = scene.solid("shelf-right").aabb()
        width = right.lo[1] - left.hi[1]
        self.assertAlmostEqual(width, 0.8 * GeneratorConfig.BASE_INTERIOR_WIDTH, places=12)
        self.assertAlmostEqual(width, 0.295, places=12)

    def test_demonstrations_are_collision_free(self):
        """
        Test that demonstrations of every container archetype start outside
        all solids, never enter an obstacle voxel and end on the target.
        """
        for archetype in (Archetype.SHELF, Archetype.CABINET, Archetype.DRAWER):
            for seed in range(4):
                scene, demo = generate_scene(seed, GeneratorParams(archetype=archetype))
                geometry = GridGeometry.covering(scene.bounds, 0.025)
                obstacle_voxels = occupancy_mask(scene.obstacles, geometry)
                for point in demo.positions:
                    cell = geometry.cell_of(point)
                    if cell is not None:
                        self.assertFalse(obstacle_voxels[cell], (archetype, seed))
                start = demo.positions[0]
                self.assertFalse(any(contains(start, solid) for solid in scene.solids))
                self.assertLessEqual(unsigned_distance(demo.contact_position, [scene.target]), 0.025)
                self.assertEqual(demo.contact_index, len(demo) - 1)

    def test_demonstration_slows_down_at_contact(self):
        """
        Test that the demonstration cruises at 1 m/s and reaches the target
        at 0.2 m/s.
        """
        _, demo = generate_scene(11)
        self.assertAlmostEqual(demo.speeds[-1], 0.2)
        self.assertAlmostEqual(demo.speeds[0], 1.0)

    def test_generated_door_is_open(self):
        """
        Test that cabinets are generated with their door swung open.
        """
        scene, _ = generate_scene(5, GeneratorParams(archetype=Archetype.CABINET))
        door = scene.solid("door")
        self.assertEqual(door.role, Role.DOOR)
        self.assertFalse(door.articulation.is_closed)

    def test_exhausted_attempts(self):
        """
        Test that an impossible layout raises a generation failure after the
        bounded number of attempts.
        """
        with self.assertRaises(GenerationFailure):
            generate_scene(0, GeneratorParams(obstacle_count=60, max_attempts=3))

    def test_open_archetype_layout(self):
        """
        Test that the free-standing archetype holds only the support slab
        and the target when no obstacles are requested.
        """
        scene, demo = generate_scene(2, GeneratorParams(archetype=Archetype.OPEN, obstacle_count=0))
        self.assertEqual(sorted(s.id for s in scene.solids), ["support", "target"])
        self.assertGreater(len(demo), 2)
