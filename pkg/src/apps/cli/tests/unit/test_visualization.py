"""Unit tests for the PLY and CSV exporters."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.cli.run_config import RunConfig
from src.apps.cli.visualization import field_cloud, field_slice, ply_text, slice_csv
from src.apps.eikonal.fields import FieldTriple
from src.apps.scene.grids import GridGeometry, ScalarGrid3


def ramp_fields():
    """
    Fields on a 4x3x2 grid whose D_toa equals the z index, with one
    infinite cell.
    """
    geometry = GridGeometry((0.0, 0.0, 0.0), 0.5, (4, 3, 2))
    values = np.broadcast_to(np.arange(2.0), (4, 3, 2)).copy()
    values[0, 0, 1] = np.inf
    zeros = ScalarGrid3.filled(geometry, 0.0)
    return FieldTriple(zeros, zeros, ScalarGrid3(geometry, values))


class PlyTextTest(SimpleTestCase):
    """
    Unit tests for ply_text.
    """

    def test_header(self):
        """
        Test that the header declares the vertex count, the extra
        properties and the config hash.
        """
        config = RunConfig("export-vis", {"channel": "d_toa"})
        text = ply_text(np.zeros((2, 3)), {"speed": [1.0, 0.5]}, config)
        header, body = text.split("end_header\n")
        lines = header.splitlines()
        self.assertEqual(lines[:2], ["ply", "format ascii 1.0"])
        self.assertIn(f"comment config_hash {config.digest}", lines)
        self.assertIn("element vertex 2", lines)
        self.assertEqual(lines[-1], "property float speed")
        self.assertEqual(body.splitlines(), ["0.0 0.0 0.0 1.0", "0.0 0.0 0.0 0.5"])


class FieldExportTest(SimpleTestCase):
    """
    Unit tests for field_cloud and field_slice.
    """

    def test_cloud_keeps_finite_cells_above_minimum(self):
        """
        Test that only finite cells above the threshold are exported.
        """
        points, properties = field_cloud(ramp_fields(), "d_toa", minimum=0.5)
        self.assertEqual(len(points), 4 * 3 - 1)
        np.testing.assert_array_equal(properties["d_toa"], 1.0)
        np.testing.assert_allclose(points[:, 2], 0.75)

    def test_slice_layer(self):
        """
        Test that a plane picks the layer of cells it crosses.
        """
        points, values = field_slice(ramp_fields(), "d_toa", "z", at=0.6)
        self.assertEqual(len(values), 12)
        np.testing.assert_allclose(points[:, 2], 0.75)
        self.assertEqual(int(np.sum(np.isinf(values))), 1)
        _, middle = field_slice(ramp_fields(), "d_toa", "x")
        self.assertEqual(len(middle), 6)

    def test_slice_outside_grid(self):
        """
        Test that a plane beyond the grid is rejected.
        """
        with self.assertRaises(ValidationError):
            field_slice(ramp_fields(), "d_toa", "y", at=2.0)

    def test_csv_header(self):
        """
        Test that the CSV starts with the config hash and the columns.
        """
        config = RunConfig("export-vis", {})
        points, values = field_slice(ramp_fields(), "d_toa", "z", at=0.1)
        lines = slice_csv(points, values, config).splitlines()
        self.assertEqual(lines[0], f"# config_hash={config.digest}")
        self.assertEqual(lines[1], "x,y,z,value")
        self.assertEqual(len(lines), 2 + 12)
