"""Unit tests for generate.py."""
import random
import unittest

from wander_atlas.core.errors import AddressError, InfeasibleSpec
from wander_atlas.core.model import AUXILIARY, MAIN, AtomShape, MapSpec, SingularEvent
from wander_atlas.engine.generate import (
    atom_addresses,
    balanced_partition,
    check_spec,
    generate,
    main_stump_depth,
)
from wander_atlas.engine.validate import validate


def quadratic_spec() -> MapSpec:
    return MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),), label="z^2+1")


def two_two_spec(degree: int = 2) -> MapSpec:
    if degree == 2:
        return MapSpec(
            degree=2,
            singular_events=(SingularEvent((0,), 2), SingularEvent((0,), 2)),
            trunk_windings=(1, 1),
            shapes=(AtomShape((0,), internal=2),),
        )
    return MapSpec(
        degree=3,
        singular_events=(SingularEvent((0,), 3), SingularEvent((0,), 2)),
        trunk_windings=(2, 1),
        shapes=(AtomShape((0,), internal=2),),
    )


class TestBalancedPartition(unittest.TestCase):
    """Unit tests for balanced_partition."""

    def test_even(self):
        self.assertEqual(balanced_partition(4, 2), [2, 2])

    def test_uneven(self):
        self.assertEqual(balanced_partition(5, 3), [2, 2, 1])

    def test_single_part(self):
        self.assertEqual(balanced_partition(3, 1), [3])


class TestCheckSpec(unittest.TestCase):
    """Unit tests for check_spec and the infeasibility rules it names."""

    def assertRule(self, spec, rule):
        with self.assertRaises(InfeasibleSpec) as caught:
            check_spec(spec)
        self.assertEqual(caught.exception.rule, rule)
        self.assertIn(f"[{rule}]", str(caught.exception))

    def test_ladder_passes(self):
        check_spec(MapSpec(degree=2))

    def test_homeomorphism(self):
        spec = MapSpec(degree=1, singular_events=(SingularEvent((0,), 2),))
        self.assertRule(spec, "homeomorphism-has-no-singular-points")

    def test_multiplicity_above_degree(self):
        spec = MapSpec(degree=2, singular_events=(SingularEvent((0,), 3),))
        self.assertRule(spec, "riemann-hurwitz")

    def test_single_event_needs_full_degree(self):
        spec = MapSpec(degree=3, singular_events=(SingularEvent((0,), 2),))
        self.assertRule(spec, "single-singular-degree")

    def test_no_main_stump(self):
        spec = MapSpec(degree=2, singular_events=(SingularEvent((1,), 2),))
        self.assertRule(spec, "no-main-stump")

    def test_annulus_has_one_trunk(self):
        self.assertRule(MapSpec(degree=2, trunk_windings=(1, 1)), "annulus-admits-no-auxiliary-trunk")

    def test_shape_needs_event(self):
        spec = MapSpec(
            degree=2,
            singular_events=(SingularEvent((0,), 2),),
            shapes=(AtomShape((0, 0), internal=1),),
        )
        self.assertRule(spec, "shape-without-singular-point")

    def test_base_address(self):
        spec = MapSpec(degree=2, singular_events=(SingularEvent((), 2),))
        with self.assertRaises(AddressError):
            check_spec(spec)

    def test_bad_trunk_partition(self):
        with self.assertRaises(InfeasibleSpec) as caught:
            MapSpec(degree=2, trunk_windings=(1, 2))
        self.assertEqual(caught.exception.rule, "degree-conservation")

    def test_stump_depth(self):
        spec = MapSpec(degree=2, singular_events=(SingularEvent((0, 0, 0), 2),))
        self.assertEqual(main_stump_depth(spec), 3)
        self.assertEqual(main_stump_depth(MapSpec(degree=2)), 0)


class TestLadder(unittest.TestCase):
    """A map without singular events gives a ladder of annuli."""

    def test_atom_count(self):
        graph = generate(MapSpec(degree=2), 5)
        self.assertEqual(len(graph.atoms), 6)
        self.assertEqual(graph.depth, 5)
        self.assertEqual(graph.bottom_generation, -5)

    def test_all_annular_and_main(self):
        graph = generate(MapSpec(degree=3), 3)
        for atom in graph.atoms.values():
            self.assertEqual(atom.boundary_type, (1, 1))
            self.assertEqual(atom.cover_degree, 3)
            self.assertEqual(atom.role, MAIN)
        self.assertTrue(all(c.winding == 3 for c in graph.circles.values()))

    def test_base_chain_is_whole_ladder(self):
        graph = generate(MapSpec(degree=2), 4)
        self.assertEqual(list(graph.base_chain), sorted(graph.atoms))

    def test_depth_must_be_positive(self):
        with self.assertRaises(ValueError):
            generate(MapSpec(degree=2), 0)


class TestQuadraticRoot(unittest.TestCase):
    """One double point at the first preimage of the base: the z^2 + 1 picture."""

    def setUp(self):
        self.graph = generate(quadratic_spec(), 5)

    def test_counts(self):
        self.assertEqual(len(self.graph.atoms), 64)
        self.assertEqual(self.graph.depth, 6)
        for k in range(1, 7):
            self.assertEqual(len(self.graph.atoms_at(-k)), 2 ** (k - 1))

    def test_stump(self):
        stump = self.graph.atoms_at(-1)[0]
        self.assertEqual(stump.boundary_type, (1, 2))
        self.assertEqual(stump.singular, (2,))
        self.assertEqual(stump.cover_degree, 2)
        self.assertEqual(self.graph.singular_generations(), [-1])

    def test_root_is_homeomorphic(self):
        for atom in self.graph.atoms.values():
            if atom.generation < -1:
                self.assertEqual(atom.boundary_type, (1, 2))
                self.assertEqual(atom.cover_degree, 1)

    def test_valid(self):
        report = validate(self.graph, threads=2)
        self.assertTrue(report.ok, report.to_json())

    def test_deterministic(self):
        again = generate(quadratic_spec(), 5)
        self.assertEqual(again, self.graph)

    def test_addresses(self):
        addresses = atom_addresses(self.graph)
        self.assertEqual(addresses[0], ())
        self.assertEqual(addresses[1], (0,))
        self.assertEqual(sorted(a for a in addresses.values() if len(a) == 2), [(0, 0), (0, 1)])


class TestTwoTwoStump(unittest.TestCase):
    """Two double points sharing the stump with an auxiliary trunk."""

    def test_degree_two(self):
        graph = generate(two_two_spec(2), 3)
        stump = graph.atoms_at(-1)[0]
        self.assertEqual(stump.boundary_type, (2, 2))
        self.assertEqual(stump.singular, (2, 2))
        self.assertTrue(validate(graph).ok)

    def test_degree_three(self):
        graph = generate(two_two_spec(3), 3)
        stump = graph.atoms_at(-1)[0]
        self.assertEqual(stump.boundary_type, (2, 3))
        self.assertEqual(stump.cover_degree, 3)
        self.assertTrue(validate(graph).ok)


class TestInfeasible(unittest.TestCase):
    """Specs the lifting rejects."""

    def test_two_one_stump(self):
        spec = MapSpec(
            degree=2,
            singular_events=(SingularEvent((0,), 2),),
            trunk_windings=(1, 1),
            shapes=(AtomShape((0,), internal=2),),
        )
        with self.assertRaises(InfeasibleSpec) as caught:
            generate(spec, 3)
        self.assertEqual(caught.exception.rule, "infinitely-many-singular-points")

    def test_auxiliary_trunk_needs_shallow_stump(self):
        spec = MapSpec(
            degree=2,
            singular_events=(SingularEvent((0, 0), 2), SingularEvent((0, 0), 2)),
            trunk_windings=(1, 1),
        )
        with self.assertRaises(InfeasibleSpec) as caught:
            generate(spec, 2)
        self.assertEqual(caught.exception.rule, "disconnected-auxiliary-trunk")

    def test_missing_address(self):
        spec = MapSpec(
            degree=2,
            singular_events=(SingularEvent((0,), 2), SingularEvent((0, 5), 2)),
        )
        with self.assertRaises(AddressError):
            generate(spec, 3)


class TestRandomSpecs(unittest.TestCase):
    """Every generated graph of a feasible random spec passes every rule."""

    def random_address(self, rng: random.Random, degree: int) -> tuple:
        length = rng.randint(1, 3)
        return tuple(rng.randrange(degree) if rng.random() < 0.3 else 0 for _ in range(length))

    def random_windings(self, rng: random.Random, degree: int) -> tuple:
        if degree == 1 or rng.random() < 0.7:
            return (degree,)
        first = rng.randint(1, degree - 1)
        return (first, degree - first)

    def random_spec(self, rng: random.Random) -> MapSpec:
        degree = rng.randint(1, 4)
        if degree == 1 or rng.random() < 0.15:
            return MapSpec(degree=degree)
        if rng.random() < 0.3:
            stump = (0,) * rng.randint(1, 3)
            return MapSpec(degree=degree, singular_events=(SingularEvent(stump, degree),))
        events = tuple(
            SingularEvent(self.random_address(rng, degree), rng.randint(2, degree))
            for _ in range(rng.randint(1, 3))
        )
        shapes = ()
        if rng.random() < 0.3:
            shapes = (AtomShape(events[0].atom_address, internal=rng.randint(1, 2)),)
        return MapSpec(
            degree=degree,
            singular_events=events,
            trunk_windings=self.random_windings(rng, degree),
            shapes=shapes,
        )

    def test_property_suite(self):
        """Test 200 accepted random specs against validate and the role calculus."""
        rng = random.Random(20240601)
        accepted = rejected = 0
        while accepted < 200 and rejected < 5000:
            spec = self.random_spec(rng)
            depth = rng.randint(1, 6 if spec.degree <= 2 else 4)
            try:
                graph = generate(spec, depth)
            except (InfeasibleSpec, AddressError):
                rejected += 1
                continue
            accepted += 1
            report = validate(graph, threads=1)
            self.assertTrue(report.ok, (spec, report.to_json()))
            for atom in graph.atoms.values():
                self.assertIn(atom.role, (MAIN, AUXILIARY))
                if atom.role == MAIN and atom.image_atom in graph.atoms:
                    self.assertEqual(graph.atoms[atom.image_atom].role, MAIN, spec)
            for atom_id in graph.base_chain:
                self.assertEqual(graph.atoms[atom_id].role, MAIN)
        self.assertEqual(accepted, 200)
        self.assertGreater(rejected, 0)

if __name__ == "__main__":
    unittest.main()
