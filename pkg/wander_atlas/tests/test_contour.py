"""Unit tests for contour.py."""
import math
import unittest

import numpy as np

from wander_atlas.core.model import Grid
from wander_atlas.oracle.contour import (
    escape_time_grid,
    grid_nodes,
    level_components,
    make_grid,
    merge_pieces,
    tau_field,
    trace_levels,
)
from wander_atlas.oracle.holo import power_map, quadratic_map, tau


class TestGrid(unittest.TestCase):
    """Unit tests for make_grid and grid_nodes."""

    def test_power_grid_holds_levels(self):
        """Test that the log-polar window contains the requested levels."""
        grid = make_grid(power_map(2), -1.5, 3.5, resolution=64)
        r_min, r_max = grid.extent
        self.assertEqual(grid.kind, "logpolar")
        self.assertLess(math.exp(2**1.5), r_max)
        self.assertGreater(math.exp(2**-3.5), r_min)
        self.assertGreater(r_min, 1.0)

    def test_seam(self):
        """Test that the last log-polar column repeats the first."""
        x, y = grid_nodes(Grid("logpolar", (1.5, 10.0), 32))
        np.testing.assert_array_equal(x[:, 0], x[:, -1])
        np.testing.assert_array_equal(y[:, 0], y[:, -1])

    def test_cartesian(self):
        """Test the default window of z^2 + c and a map-supplied one."""
        self.assertEqual(make_grid(quadratic_map(1.0), 0, 1, 16).extent, (-3.0, 3.0, -3.0, 3.0))
        holo = quadratic_map(1.0, grid=Grid("cartesian", (-2.0, 2.0, -2.0, 2.0), 8))
        grid = make_grid(holo, 0, 1, 32)
        self.assertEqual((grid.extent, grid.resolution), ((-2.0, 2.0, -2.0, 2.0), 32))

    def test_escape_time_grid(self):
        """Test that bounded orbits show up as NaN."""
        values = escape_time_grid(quadratic_map(-1.0), Grid("cartesian", (-3.0, 3.0, -3.0, 3.0), 65), threads=2)
        self.assertTrue(np.isnan(values[32, 32]))
        self.assertTrue(np.isfinite(values[0, 0]))

    def test_threaded_field(self):
        """Test that the threaded sampling equals the serial one."""
        grid = Grid("cartesian", (-3.0, 3.0, -3.0, 3.0), 40)
        serial = tau_field(quadratic_map(1.0), grid, threads=1).tau
        threaded = tau_field(quadratic_map(1.0), grid, threads=3).tau
        np.testing.assert_allclose(serial, threaded, rtol=1e-12)


class TestMergePieces(unittest.TestCase):
    """Unit tests for merge_pieces."""

    def test_join(self):
        """Test that two halves of a square close into a loop."""
        first = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        second = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
        dangling = np.array([[5.0, 5.0], [6.0, 6.0]])
        loops, open_lines = merge_pieces([first, second, dangling])
        self.assertEqual(len(loops), 1)
        self.assertEqual(len(loops[0]), 5)
        self.assertEqual(len(open_lines), 1)

    def test_reversed_piece(self):
        """Test that a piece running the other way is flipped."""
        first = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        second = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        loops, open_lines = merge_pieces([first, second])
        self.assertEqual((len(loops), len(open_lines)), (1, 0))


class TestTraceLevels(unittest.TestCase):
    """Unit tests for trace_levels and level_components."""

    def test_power_circle(self):
        """Test that the level -1 of z^2 is the circle of radius e^2."""
        components = level_components(trace_levels(power_map(2), -1.0, resolution=512, threads=2))
        self.assertEqual(len(components), 1)
        np.testing.assert_allclose(np.abs(components[0]), math.exp(2), rtol=1e-2)

    def test_quadratic_split(self):
        """Test that z^2 + 1 levels split at the critical level."""
        holo = quadratic_map(1.0)
        top = tau(holo, 0j)
        self.assertEqual(trace_levels(holo, top - 0.25, resolution=1024).count, 1)
        self.assertEqual(trace_levels(holo, top + 0.25, resolution=1024).count, 2)
        self.assertEqual(trace_levels(holo, top + 1.25, resolution=1024).count, 4)

    def test_critical_level_refused(self):
        """Test that levels through a critical point are refused."""
        holo = quadratic_map(1.0)
        with self.assertRaises(ValueError):
            trace_levels(holo, tau(holo, 0j) + 1e-4, resolution=64)


if __name__ == "__main__":
    unittest.main()
