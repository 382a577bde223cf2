"""Unit tests for validate.py, transport.py and scan.py."""
import unittest
from dataclasses import replace

from wander_atlas.core.errors import TransportViolation
from wander_atlas.core.model import AtomGraph, Circle, MapSpec, SingularEvent
from wander_atlas.engine.generate import generate
from wander_atlas.engine.scan import DEEP_HOMEOMORPHISM, INFINITE_SINGULAR, infeasibility_scan
from wander_atlas.engine.transport import classify_types
from wander_atlas.engine.validate import RULES, validate

RULE_NAMES = [
    "euler-boundary",
    "riemann-hurwitz",
    "gluing-acyclic",
    "single-shared-circle",
    "degree-conservation",
    "generation-step",
    "type-transport",
    "infeasible-pattern",
]


def ladder(depth: int = 3) -> AtomGraph:
    return generate(MapSpec(degree=2), depth)


def with_atom(graph: AtomGraph, atom_id: int, **changes) -> AtomGraph:
    atoms = dict(graph.atoms)
    atoms[atom_id] = replace(atoms[atom_id], **changes)
    return replace(graph, atoms=atoms)


class TestValidate(unittest.TestCase):
    """Unit tests for validate."""

    def test_rule_order(self):
        """Test that the report lists every rule in fixed order."""
        report = validate(ladder(), threads=4)
        self.assertEqual([r.rule for r in report.results], RULE_NAMES)
        self.assertEqual(len(RULES), len(RULE_NAMES))
        self.assertTrue(report.ok)
        self.assertEqual(report.to_json()["rules"][0]["status"], "pass")

    def test_generated_graphs_pass(self):
        """Test that generated graphs satisfy every rule."""
        specs = [
            MapSpec(degree=1),
            MapSpec(degree=3),
            MapSpec(degree=2, singular_events=(SingularEvent((0, 0), 2),)),
            MapSpec(degree=3, singular_events=(SingularEvent((0,), 3),)),
        ]
        for spec in specs:
            report = validate(generate(spec, 3), threads=1)
            self.assertTrue(report.ok, report.to_json())

    def test_broken_riemann_hurwitz(self):
        """Test that a singular point on a ladder annulus breaks Riemann-Hurwitz."""
        graph = with_atom(ladder(), 2, singular=(2,))
        report = validate(graph)
        result = report.by_rule("riemann-hurwitz")
        self.assertFalse(result.passed)
        self.assertIn(2, result.offenders)
        self.assertFalse(report.ok)

    def test_multiplicity_above_cover(self):
        """Test that a multiplicity larger than the cover degree is flagged."""
        graph = with_atom(ladder(), 1, singular=(3,))
        self.assertIn(1, validate(graph).by_rule("riemann-hurwitz").offenders)

    def test_doubled_gluing(self):
        """Test that two circles between the same atoms form a cycle."""
        graph = ladder()
        extra = Circle(id=100, level=-1, inner_atom=2, outer_atom=1, image_circle=None, winding=1)
        circles = dict(graph.circles)
        circles[100] = extra
        atoms = dict(graph.atoms)
        atoms[1] = replace(atoms[1], external=atoms[1].external + (100,))
        atoms[2] = replace(atoms[2], internal=atoms[2].internal + (100,))
        report = validate(replace(graph, atoms=atoms, circles=circles))
        self.assertFalse(report.by_rule("gluing-acyclic").passed)
        shared = report.by_rule("single-shared-circle")
        self.assertFalse(shared.passed)
        self.assertEqual(sorted(shared.offenders), [1, 2])

    def test_dangling_circle(self):
        """Test that a missing circle fails the report instead of raising."""
        graph = with_atom(ladder(), 1, external=(999,))
        report = validate(graph)
        self.assertFalse(report.by_rule("euler-boundary").passed)
        self.assertEqual(len(report.results), len(RULE_NAMES))

    def test_generation_step(self):
        """Test that an image two generations up is flagged."""
        graph = with_atom(ladder(), 3, image_atom=1)
        self.assertIn(3, validate(graph).by_rule("generation-step").offenders)


class TestTransport(unittest.TestCase):
    """Unit tests for classify_types."""

    def test_types(self):
        """Test the boundary types of the z^2 + 1 picture."""
        graph = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 2)
        types = classify_types(graph)
        self.assertEqual(types[0], (1, 1))
        self.assertEqual(types[1], (1, 2))
        self.assertEqual(set(types.values()), {(1, 1), (1, 2)})

    def test_violation(self):
        """Test that a non-annular preimage of an annulus without singular points is rejected."""
        graph = ladder()
        circles = dict(graph.circles)
        circles[100] = Circle(100, -2, None, 2, None, 1)
        graph = replace(
            with_atom(graph, 2, external=graph.atoms[2].external + (100,)), circles=circles
        )
        with self.assertRaises(TransportViolation) as caught:
            classify_types(graph)
        self.assertEqual(caught.exception.pairs[0][0], 2)


class TestScan(unittest.TestCase):
    """Unit tests for infeasibility_scan."""

    def test_clean(self):
        """Test that generated graphs have no findings."""
        graph = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 3)
        self.assertEqual(infeasibility_scan(graph), [])

    def test_deep_homeomorphism(self):
        """Test that a deepest atom covering with degree 2 below the events is flagged."""
        graph = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 2)
        deepest = graph.atoms_at(graph.bottom_generation)[0]
        findings = infeasibility_scan(with_atom(graph, deepest.id, cover_degree=2))
        self.assertIn(DEEP_HOMEOMORPHISM, [f.rule for f in findings])

    def test_type_a1_chain(self):
        """Test that a main chain of type (a, 1) atoms down to the frontier is flagged."""
        graph = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 2)
        stump = graph.atoms_at(-1)[0]
        circles = dict(graph.circles)
        atoms = dict(graph.atoms)
        next_id = max(circles) + 1
        for atom in graph.atoms.values():
            if atom.generation < -1:
                # give each root atom a second internal circle and a single external one
                circles[next_id] = Circle(next_id, atom.generation + 1, atom.id, None, None, 1)
                atoms[atom.id] = replace(
                    atom, internal=atom.internal + (next_id,), external=atom.external[:1]
                )
                next_id += 1
        findings = infeasibility_scan(replace(graph, atoms=atoms, circles=circles))
        rules = [f.rule for f in findings]
        self.assertIn(INFINITE_SINGULAR, rules)
        self.assertTrue(all(stump.id == f.atoms[0] for f in findings if f.rule == INFINITE_SINGULAR))


if __name__ == "__main__":
    unittest.main()
