"""Unit tests for the fast marching solver."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from src.apps.eikonal.constants import MarchDiagnostics
from src.apps.eikonal.fmm import SpeedField, fmm_solve, march
from src.apps.scene.grids import GridGeometry, ScalarGrid3


def grid_graph_distances(shape, spacing, source, diagonal):
    """
    Dijkstra distances on the 6- or 26-neighbor lattice graph.
    """
    index = np.arange(np.prod(shape)).reshape(shape)
    rows, cols, weights = [], [], []
    offsets = [
        (dx, dy, dz)
        for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)
        if (dx, dy, dz) != (0, 0, 0) and (diagonal or abs(dx) + abs(dy) + abs(dz) == 1)
    ]
    for offset in offsets:
        src = [slice(max(0, -o), s - max(0, o)) for o, s in zip(offset, shape)]
        dst = [slice(max(0, o), s - max(0, -o)) for o, s in zip(offset, shape)]
        rows.append(index[tuple(src)].ravel())
        cols.append(index[tuple(dst)].ravel())
        weights.append(np.full(rows[-1].size, spacing * np.linalg.norm(offset)))
    graph = coo_matrix((np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))))
    return dijkstra(graph.tocsr(), indices=index[source]).reshape(shape)


class MarchTest(SimpleTestCase):
    """
    Unit tests for march and fmm_solve.
    """

    def test_source_keeps_its_value(self):
        """
        Test that a source cell holds its initial value.
        """
        arrival, diagnostics = march(np.ones((5, 5, 5)), 0.1, [((2, 2, 2), 0.0)])
        self.assertEqual(arrival[2, 2, 2], 0.0)
        self.assertEqual(diagnostics, [])

    def test_impassable_cell_is_infinite(self):
        """
        Test that zero-speed cells receive +inf.
        """
        speed = np.ones((6, 6, 6))
        speed[4, 4, 4] = 0.0
        arrival, _ = march(speed, 0.1, [((0, 0, 0), 0.0)])
        self.assertTrue(np.isinf(arrival[4, 4, 4]))
        self.assertTrue(np.all(np.isfinite(np.delete(arrival.ravel(), np.ravel_multi_index((4, 4, 4), (6, 6, 6))))))

    def test_all_sources_impassable(self):
        """
        Test that impassable sources give an all-infinite field with a
        diagnostic instead of an error.
        """
        geometry = GridGeometry((0, 0, 0), 0.1, (4, 4, 4))
        speed = np.ones((4, 4, 4))
        speed[0, 0, 0] = 0.0
        arrival = fmm_solve(SpeedField(ScalarGrid3(geometry, speed)), [((0, 0, 0), 0.0)])
        self.assertTrue(np.all(np.isinf(arrival.values)))
        self.assertEqual(arrival.notes, (MarchDiagnostics.NO_PASSABLE_SOURCE,))

    def test_requires_sources(self):
        """
        Test that marching without sources is rejected.
        """
        with self.assertRaises(ValidationError):
            march(np.ones((3, 3, 3)), 0.1, [])

    def test_rejects_negative_speed(self):
        """
        Test that a negative finite speed is rejected.
        """
        geometry = GridGeometry((0, 0, 0), 0.1, (2, 2, 2))
        with self.assertRaises(ValidationError):
            SpeedField(ScalarGrid3(geometry, -np.ones((2, 2, 2))))

    def test_source_order_invariance(self):
        """
        Test that permuting the sources leaves the arrival unchanged.
        """
        speed = np.random.default_rng(1).uniform(0.5, 2.0, size=(12, 10, 8))
        sources = [((1, 2, 3), 0.0), ((8, 7, 1), 0.05), ((5, 5, 5), 0.02), ((1, 2, 3), 0.01)]
        first, _ = march(speed, 0.05, sources)
        second, _ = march(speed, 0.05, sources[::-1])
        np.testing.assert_array_equal(first, second)

    def test_two_dimensional_grid(self):
        """
        Test that a 2D march along an axis gives exact distances.
        """
        arrival, _ = march(np.ones((20, 3)), 0.5, [((0, 1), 0.0)])
        np.testing.assert_allclose(arrival[:, 1], 0.5 * np.arange(20))

    def test_point_source_accuracy(self):
        """
        Test that a point source on an empty 64^3 grid stays within 10% of
        the Euclidean distance beyond 10 voxels, never exceeds the
        6-neighbor lattice distance and tracks the 26-neighbor lattice
        distance within 15%.
        """
        n, h = 64, 1.0
        source = (5, 9, 12)
        arrival, _ = march(np.ones((n, n, n)), h, [(source, 0.0)])
        index = np.indices((n, n, n)).transpose(1, 2, 3, 0)
        euclid = np.linalg.norm((index - np.asarray(source)) * h, axis=-1)
        far = euclid > 10 * h
        relative = np.abs(arrival[far] - euclid[far]) / euclid[far]
        self.assertLessEqual(relative.max(), 0.10)

        manhattan = np.abs(index - np.asarray(source)).sum(axis=-1) * h
        self.assertTrue(np.all(arrival <= manhattan + 1e-9))

        lattice = grid_graph_distances((n, n, n), h, source, diagonal=True)
        ratio = arrival[far] / lattice[far]
        self.assertTrue(np.all(np.abs(ratio - 1.0) <= 0.15))

    def test_first_order_convergence(self):
        """
        Test that halving the spacing reduces the maximum relative error
        monotonically over three refinements.
        """
        errors = []
        for n in (16, 32, 64):
            h = 1.0 / n
            arrival, _ = march(np.ones((n, n, 4)), h, [((0, 0, 0), 0.0)])
            index = np.indices((n, n, 4)).transpose(1, 2, 3, 0)
            exact = np.linalg.norm(index * h, axis=-1)
            region = exact >= 0.5
            errors.append(np.max(np.abs(arrival[region] - exact[region]) / exact[region]))
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])
