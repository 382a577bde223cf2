"""Unit tests for extract.py and crosscheck.py of the numerical oracle."""
import math
import unittest
import warnings
from dataclasses import replace

import numpy as np

from wander_atlas.core.errors import AmbiguousRegion, ResolutionWarning
from wander_atlas.core.model import MapSpec, SingularEvent
from wander_atlas.engine.generate import generate
from wander_atlas.engine.validate import validate
from wander_atlas.oracle.crosscheck import crosscheck, labelled_graph
from wander_atlas.oracle.extract import (
    check_level,
    circle_winding,
    default_level,
    extract_atom_graph,
    interior_point,
    resample,
)
from wander_atlas.oracle.holo import power_map, quadratic_map, tau


def circle(radius: float, count: int = 200) -> np.ndarray:
    angles = np.linspace(0.0, 2 * math.pi, count)
    return np.column_stack((radius * np.cos(angles), radius * np.sin(angles)))


class TestHelpers(unittest.TestCase):
    """Unit tests for the extraction helpers."""

    def test_levels(self):
        """Test the default base constants and the refused ones."""
        holo = quadratic_map(1.0)
        top = tau(holo, 0j)
        self.assertEqual(default_level(power_map(2)), -0.5)
        self.assertAlmostEqual(default_level(holo), top - 0.5)
        with self.assertRaises(ValueError):
            check_level(holo, top - 1.01)
        with self.assertRaises(ValueError):
            check_level(holo, top + 0.5)
        check_level(holo, top - 0.5)

    def test_resample(self):
        """Test that resampled points are evenly spaced."""
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
        points = resample(square, 8)
        self.assertEqual(len(points), 8)
        np.testing.assert_allclose(np.abs(np.diff(points)), 0.5)

    def test_interior_point(self):
        """Test that the interior point of a circle is near its centre."""
        point = interior_point(circle(2.0) + np.array([5.0, 1.0]))
        self.assertLess(abs(point - (5 + 1j)), 0.2)

    def test_circle_winding(self):
        """Test the degree of z^3 on a circle around the origin."""
        self.assertEqual(circle_winding(power_map(3), circle(2.0), 0j), 3)
        self.assertEqual(circle_winding(quadratic_map(1.0), circle(3.0), 1 + 0j), 2)

    def test_depth(self):
        """Test that depth must be positive."""
        with self.assertRaises(ValueError):
            extract_atom_graph(power_map(2), depth=0)


class TestExtractPower(unittest.TestCase):
    """Extraction of z^d, whose components are ladders of annuli."""

    def test_square(self):
        """Test that z^2 gives the generated ladder."""
        graph = extract_atom_graph(power_map(2), depth=4, resolution=512, threads=2)
        self.assertEqual(len(graph.atoms), 5)
        self.assertEqual(sorted(a.generation for a in graph.atoms.values()), [-4, -3, -2, -1, 0])
        self.assertTrue(all(c.winding == 2 for c in graph.circles.values()))
        self.assertTrue(validate(graph).ok)
        same, detail = crosscheck(generate(MapSpec(degree=2), 4), graph)
        self.assertTrue(same, detail)

    def test_cube(self):
        """Test that z^3 gives windings of three."""
        graph = extract_atom_graph(power_map(3), depth=3, resolution=512)
        self.assertEqual(graph.spec.trunk_windings, (3,))
        same, detail = crosscheck(generate(MapSpec(degree=3), 3), graph)
        self.assertTrue(same, detail)


class TestCrosscheck(unittest.TestCase):
    """Unit tests for crosscheck on generated graphs."""

    def setUp(self):
        self.graph = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 3)

    def test_relabelled(self):
        """Test that renumbering atoms keeps the graphs isomorphic."""
        shift = {atom_id: 100 + atom_id for atom_id in self.graph.atoms}
        atoms = {
            shift[a.id]: replace(
                a, id=shift[a.id], image_atom=None if a.image_atom is None else shift[a.image_atom]
            )
            for a in self.graph.atoms.values()
        }
        circles = {
            c.id: replace(
                c,
                inner_atom=None if c.inner_atom is None else shift[c.inner_atom],
                outer_atom=None if c.outer_atom is None else shift[c.outer_atom],
            )
            for c in self.graph.circles.values()
        }
        other = replace(self.graph, atoms=atoms, circles=circles, base_chain=(100,))
        self.assertEqual(crosscheck(self.graph, other), (True, "isomorphic"))

    def test_differences(self):
        """Test the detail of non-isomorphic graphs."""
        same, detail = crosscheck(self.graph, generate(MapSpec(degree=2), 3))
        self.assertFalse(same)
        self.assertTrue(detail.startswith("atom counts differ"))
        atoms = dict(self.graph.atoms)
        atoms[4] = replace(atoms[4], cover_degree=2)
        same, detail = crosscheck(self.graph, replace(self.graph, atoms=atoms))
        self.assertFalse(same)
        self.assertTrue(detail.startswith("atom labels differ"))

    def test_labels(self):
        """Test the node label of the stump."""
        label = labelled_graph(self.graph).nodes[1]["label"]
        self.assertEqual(label, (-1, (1, 2), (2,), 2, ()))


class TestExtractQuadratic(unittest.TestCase):
    """Extraction of z^2 + 1 against the generated picture."""

    def test_quadratic(self):
        """Test that z^2 + 1 matches one double point at the first preimage, five levels down."""
        spec = MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),))
        generated = generate(spec, 4)
        self.assertEqual(generated.depth, 5)
        graph = extract_atom_graph(quadratic_map(1.0), depth=generated.depth, resolution=2048)
        self.assertEqual(len(graph.atoms), 32)
        report = validate(graph)
        self.assertTrue(report.ok, report.to_json())
        stump = graph.atoms_at(-1)
        self.assertEqual(len(stump), 1)
        self.assertEqual(stump[0].boundary_type, (1, 2))
        self.assertEqual(stump[0].singular, (2,))
        self.assertEqual(graph.spec.singular_events, spec.singular_events)
        same, detail = crosscheck(generated, graph)
        self.assertTrue(same, detail)

    def test_depth_beyond_grid(self):
        """Test that a depth the grid cannot resolve is refused instead of returned."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            with self.assertRaises(AmbiguousRegion):
                extract_atom_graph(quadratic_map(1.0), depth=7, resolution=256, max_resolution=256)


if __name__ == "__main__":
    unittest.main()
