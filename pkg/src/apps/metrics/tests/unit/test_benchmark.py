"""Unit tests for the planner benchmark."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.cli.run_config import RunConfig
from src.apps.common.exceptions import UnreachableTarget
from src.apps.metrics.benchmark import (
    BenchReport,
    SceneResult,
    benchmark,
    planner_for,
    report_csv,
    straight_planner,
)
from src.apps.metrics.constants import REPORT_COLUMNS, BenchPlanner
from src.apps.planner.orientation import transfer_orientation
from src.apps.planner.pipeline import PlanResult
from src.tests.helpers.scenes import box, lone_target_scene, straight_demo


def open_source(seed):
    """
    Lone target beside a wall, approached along +x from 0.3 m away.
    """
    offset = np.array([0.0, 0.1 * seed, 0.0])
    wall = box("wall", offset + (0.1, 0.2, 0.0), (0.6, 0.1, 0.1))
    scene = lone_target_scene(center=tuple(offset), extra=(wall,))
    return scene, straight_demo(offset + (0.3, 0.0, 0.0), offset + (0.04, 0.0, 0.0))


def blocked_source(seed):
    scene, demo = open_source(seed)
    post = box("post", scene.target.center + (0.15, 0.0, 0.0), (0.05, 0.05, 0.2))
    return lone_target_scene(center=tuple(scene.target.center), extra=scene.obstacles + (post,)), demo


def failing_planner(scene, demo):
    raise UnreachableTarget("no path out of the container")


def short_source(seed):
    """
    Open scene whose demonstration stops 3.5 cm short of the target
    surface, more than one grid spacing but less than a voxel diagonal.
    """
    scene, demo = open_source(seed)
    offset = scene.target.center
    return scene, straight_demo(offset + (0.3, 0.0, 0.0), offset + (0.075, 0.0, 0.0))


def one_sample_planner(scene, demo):
    return PlanResult(transfer_orientation(demo, demo.positions[:1]), None, demo.positions[0], 0.0)


class BenchmarkTest(SimpleTestCase):
    """
    Unit tests for benchmark and its report.
    """

    def test_straight_baseline_on_open_scenes(self):
        """
        Test that straight approaches in open scenes all succeed with no
        acceleration and 15 cm of clearance.
        """
        report = benchmark(range(4), BenchPlanner.STRAIGHT, source=open_source)
        aggregate = report.aggregate()
        self.assertEqual(aggregate["success_rate"], 100.0)
        self.assertAlmostEqual(aggregate["unsmoothness"], 0.0, delta=1e-6)
        self.assertAlmostEqual(aggregate["safety"], 15.0, places=6)
        self.assertAlmostEqual(aggregate["rmsc"], 0.0, places=9)

    def test_always_failing_planner(self):
        """
        Test that a planner failing everywhere scores zero with an empty
        safety aggregate and its diagnostic on every record.
        """
        report = benchmark(range(3), failing_planner, source=open_source)
        aggregate = report.aggregate()
        self.assertEqual(report.planner, "failing_planner")
        self.assertEqual(aggregate["success_rate"], 0.0)
        self.assertIsNone(aggregate["safety"])
        self.assertTrue(all(r.diagnostic.startswith("unreachable") for r in report.records))

    def test_collision_recorded(self):
        """
        Test that a straight approach through a post fails the audit.
        """
        record = benchmark(range(1), straight_planner, source=blocked_source).records[0]
        self.assertFalse(record.success)
        self.assertTrue(record.diagnostic.startswith("collision"))
        self.assertIn("post", record.diagnostic)
        self.assertIsNone(record.safety)

    def test_contact_within_one_spacing(self):
        """
        Test that stopping more than one grid spacing from the target is
        recorded as a missed contact.
        """
        record = benchmark(range(1), BenchPlanner.STRAIGHT, source=short_source).records[0]
        self.assertFalse(record.success)
        self.assertTrue(record.diagnostic.startswith("contact"))

    def test_invalid_plan_is_recorded(self):
        """
        Test that a planner rejecting its own input fails that seed only,
        with the message in the diagnostic.
        """
        report = benchmark(range(3), one_sample_planner, source=open_source)
        self.assertEqual(len(report.records), 3)
        self.assertEqual(report.aggregate()["success_rate"], 0.0)
        for record in report.records:
            self.assertFalse(record.success)
            self.assertTrue(record.diagnostic.startswith("invalid: "))
            self.assertIn("Orientation transfer", record.diagnostic)

    def test_one_record_per_seed(self):
        """
        Test that eleven seeds give eleven records in seed order.
        """
        report = benchmark(range(11), BenchPlanner.STRAIGHT, source=open_source)
        self.assertEqual([r.seed for r in report.records], list(range(11)))
        lines = report_csv(report, RunConfig("bench", {"seeds": list(range(11))})).splitlines()
        self.assertTrue(lines[0].startswith("# config_hash="))
        self.assertEqual(lines[1], ",".join(REPORT_COLUMNS))
        self.assertEqual(len(lines), 13)

    def test_workers_keep_order_and_values(self):
        """
        Test that fanning out over worker processes reproduces the serial
        report.
        """
        serial = benchmark(range(4), BenchPlanner.STRAIGHT, source=open_source)
        parallel = benchmark(range(4), BenchPlanner.STRAIGHT, source=open_source, threads=2)
        self.assertEqual(parallel.to_dict(), serial.to_dict())

    def test_field_ad_needs_decoder(self):
        """
        Test that the decoded-field planner cannot be built without a
        decoder.
        """
        with self.assertRaises(ValidationError):
            planner_for(BenchPlanner.FIELD_AD)


class BenchReportTest(SimpleTestCase):
    """
    Unit tests for BenchReport aggregation.
    """

    def test_means_over_successes_only(self):
        """
        Test that metric means skip failed scenes while the success rate
        counts them.
        """
        report = BenchReport("field", 0.2, (
            SceneResult("a", 0, True, 10.0, 4.0, 0.01),
            SceneResult("b", 1, True, 30.0, 2.0, 0.03),
            SceneResult("c", 2, False, 500.0, None, 0.5, "collision: frame 3 hits shelf-left"),
        ))
        aggregate = report.aggregate()
        self.assertAlmostEqual(aggregate["success_rate"], 200.0 / 3.0)
        self.assertEqual(aggregate["unsmoothness"], 20.0)
        self.assertEqual(aggregate["safety"], 3.0)
        self.assertAlmostEqual(aggregate["rmsc"], 0.02)

    def test_empty_report(self):
        """
        Test that a report without scenes has a zero rate and no means.
        """
        aggregate = BenchReport("straight", 0.2).aggregate()
        self.assertEqual(aggregate["success_rate"], 0.0)
        self.assertIsNone(aggregate["unsmoothness"])
