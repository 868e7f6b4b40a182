"""Integration tests for the toafield entry point."""

import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

from django.test import SimpleTestCase

from src.apps.cli.constants import ExitCodes
from src.apps.cli.dispatch import dispatch
from src.apps.scene.serializers import write_scene
from src.tests.helpers.scenes import blocked_target_scene


class DispatchTest(SimpleTestCase):
    """
    Integration tests for dispatch exit statuses and artifacts.
    """

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.root = Path(self.directory.name)

    def run_toafield(self, *args):
        stdout, stderr = StringIO(), StringIO()
        with patch("sys.stdout", stdout), patch("sys.stderr", stderr):
            status = dispatch(["toafield", *args])
        return status, stdout.getvalue(), stderr.getvalue()

    def test_unknown_subcommand(self):
        """
        Test that an unknown subcommand is a usage error listing the
        valid ones.
        """
        status, _, stderr = self.run_toafield("fly")
        self.assertEqual(status, ExitCodes.USAGE)
        self.assertIn("gen-scene", stderr)

    def test_missing_required_option(self):
        """
        Test that argparse errors exit with status 2.
        """
        status, _, _ = self.run_toafield("gen-scene", "--seed", "7")
        self.assertEqual(status, ExitCodes.USAGE)

    def test_gen_scene_is_deterministic(self):
        """
        Test that generating the same seed twice writes identical files
        carrying their config hash.
        """
        out = self.root / "scene.json"
        contents = []
        for _ in range(2):
            status, _, _ = self.run_toafield("gen-scene", "--seed", "7", "--archetype", "shelf", "--out", str(out))
            self.assertEqual(status, ExitCodes.SUCCESS)
            contents.append(out.read_bytes())
        self.assertEqual(contents[0], contents[1])
        self.assertIn("hash", json.loads(contents[0])["run_config"])

    def test_domain_failure_exit_status(self):
        """
        Test that a scheduling failure exits with status 1 and a single
        diagnostic line.
        """
        scene = self.root / "scene.json"
        write_scene(scene, blocked_target_scene())
        status, _, stderr = self.run_toafield(
            "schedule", "--scene", str(scene), "--start", "0.15,0.0", "--out", str(self.root / "plan.json"),
        )
        self.assertEqual(status, ExitCodes.DOMAIN_FAILURE)
        self.assertIn("navigation", stderr)
        self.assertFalse((self.root / "plan.json").exists())
