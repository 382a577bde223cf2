"""Unit tests for roles.py."""
import unittest
from dataclasses import replace

from wander_atlas.core.errors import NotAChain, RoleContradiction
from wander_atlas.core.model import AUXILIARY, MAIN, Atom, Circle, MapSpec, SingularEvent
from wander_atlas.engine.generate import generate
from wander_atlas.engine.roles import chain_check, main_atoms, mark_main_auxiliary


def with_stray_atom(graph, image=None):
    """Adds an unreachable annulus of generation -2 as atom 99."""
    circles = dict(graph.circles)
    circles[200] = Circle(200, -1, 99, None, None, 1)
    circles[201] = Circle(201, -2, None, 99, None, 1)
    atoms = dict(graph.atoms)
    atoms[99] = Atom(99, -2, (200,), (201,), (), image, 1)
    return replace(graph, atoms=atoms, circles=circles)


class TestMainAuxiliary(unittest.TestCase):
    """Unit tests for main_atoms and mark_main_auxiliary."""

    def test_ladder_is_main(self):
        """Test that every ladder atom is main."""
        graph = generate(MapSpec(degree=2), 4)
        self.assertEqual(main_atoms(graph), set(graph.atoms))
        self.assertTrue(all(a.role == MAIN for a in graph.atoms.values()))

    def test_unreachable_is_auxiliary(self):
        """Test that an atom not reached outward from the base is auxiliary."""
        graph = mark_main_auxiliary(with_stray_atom(generate(MapSpec(degree=2), 3)))
        self.assertEqual(graph.atoms[99].role, AUXILIARY)
        self.assertEqual(graph.atoms[3].role, MAIN)

    def test_main_onto_auxiliary(self):
        """Test that a main atom mapping onto an auxiliary one is a contradiction."""
        graph = with_stray_atom(generate(MapSpec(degree=2), 3))
        atoms = dict(graph.atoms)
        atoms[3] = replace(atoms[3], image_atom=99)
        with self.assertRaises(RoleContradiction):
            mark_main_auxiliary(replace(graph, atoms=atoms))


class TestChainCheck(unittest.TestCase):
    """Unit tests for chain_check."""

    def setUp(self):
        self.ladder = generate(MapSpec(degree=2), 4)
        self.quadratic = generate(MapSpec(degree=2, singular_events=(SingularEvent((0,), 2),)), 3)

    def test_ladder_chain(self):
        """Test that a ladder chain is forward."""
        verdict = chain_check(self.ladder, [3, 2, 1, 0])
        self.assertTrue(verdict.forward)
        self.assertTrue(verdict.propagated)
        self.assertTrue(verdict.consistent)

    def test_root_chain(self):
        """Test a forward chain through the root of the z^2 + 1 picture."""
        verdict = chain_check(self.quadratic, [4, 2, 1])
        self.assertEqual(verdict.mapped, (True, True))
        self.assertTrue(verdict.forward)

    def test_crossed_chain(self):
        """Test that a chain crossing a root branching maps only its last link."""
        self.assertEqual(self.quadratic.atoms[5].image_atom, 2)
        verdict = chain_check(self.quadratic, [5, 3, 1])
        self.assertEqual(verdict.mapped, (False, True))
        self.assertFalse(verdict.forward)
        self.assertTrue(verdict.propagated)
        self.assertFalse(verdict.consistent)

    def test_single_atom(self):
        """Test that a one-atom chain is trivially forward."""
        verdict = chain_check(self.ladder, [0])
        self.assertEqual(verdict.mapped, ())
        self.assertTrue(verdict.forward)
        self.assertFalse(verdict.propagated)

    def test_not_a_chain(self):
        """Test that bad chains raise NotAChain."""
        for chain in ([], [42], [4, 3], [1, 2], [2, 0]):
            with self.assertRaises(NotAChain, msg=str(chain)):
                chain_check(self.quadratic, chain)


if __name__ == "__main__":
    unittest.main()
