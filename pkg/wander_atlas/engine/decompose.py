"""
This module splits a graph into its main trunk, main stump and main root, \
and the auxiliary remainders of the neutral saturation of the main part.
"""

from collections import deque
from dataclasses import dataclass
from typing import Optional
import networkx as nx

from wander_atlas.core.model import AtomGraph


@dataclass(frozen=True)
class AuxiliaryTrunk:
    """
    An auxiliary trunk hanging off an internal circle of the main stump. \
    `atoms` is empty when the trunk lies beyond the attractor-side frontier.
    """

    anchor: Optional[int]
    atoms: tuple


@dataclass(frozen=True)
class Decomposition:
    main_trunk: tuple
    main_stump: Optional[int]
    main_root: tuple
    auxiliary_trunks: tuple
    auxiliary_stumps: tuple
    auxiliary_root: tuple

    def to_json(self) -> dict:
        return {
            "main_trunk": list(self.main_trunk),
            "main_stump": self.main_stump,
            "main_root": list(self.main_root),
            "auxiliary_trunks": [
                {"anchor": t.anchor, "atoms": list(t.atoms)} for t in self.auxiliary_trunks
            ],
            "auxiliary_stumps": list(self.auxiliary_stumps),
            "auxiliary_root": list(self.auxiliary_root),
        }


def main_trunk(graph: AtomGraph) -> list:
    """Base annulus followed outward through annular atoms without singular points."""
    chain = [graph.base_chain[0]]
    while True:
        ahead = graph.outward_neighbors(chain[-1])
        if len(ahead) != 1:
            break
        atom = graph.atoms[ahead[0]]
        if atom.singular or not atom.annular:
            break
        chain.append(atom.id)
    return chain


def outward_closure(graph: AtomGraph, start: int) -> list:
    """`start` and every atom reached from it across external circles."""
    seen = {start}
    queue = deque([start])
    while queue:
        for neighbor in graph.outward_neighbors(queue.popleft()):
            if neighbor not in seen:
                seen.add(neighbor)
                queue.append(neighbor)
    return sorted(seen)


def forward_orbit(graph: AtomGraph, atom_id: int) -> list:
    """Materialized forward orbit, the atom itself first."""
    orbit = [atom_id]
    while graph.atoms[orbit[-1]].image_atom in graph.atoms:
        orbit.append(graph.atoms[orbit[-1]].image_atom)
    return orbit


def neutral_saturation(graph: AtomGraph, atom_ids) -> set:
    """
    Atoms X with f^n(X) = f^n(A) for some n >= 0 and some A in `atom_ids`.
    """
    marks = set()
    for atom_id in atom_ids:
        for steps, image in enumerate(forward_orbit(graph, atom_id)):
            marks.add((steps, image))
    return {
        atom_id
        for atom_id in graph.atoms
        if any((steps, image) in marks for steps, image in enumerate(forward_orbit(graph, atom_id)))
    }


def decompose(graph: AtomGraph) -> Decomposition:
    """
    Computes the trunk, stump and root decomposition.

    Args:
        graph (AtomGraph): A validated graph.

    Returns:
        Decomposition: stump and root are empty for a pure ladder.

    Graphs from generate materialize only atoms lifted from the base, so \
    their auxiliary trunks are frontier anchors with no atoms and their \
    auxiliary stumps and roots are empty; the region beyond each anchor is \
    a pulled back copy of the main trunk. Explicit graphs read from JSON may \
    populate all three.
    """
    trunk = main_trunk(graph)
    ahead = graph.outward_neighbors(trunk[-1])
    stump = next((n for n in ahead if graph.atoms[n].singular), None)
    if stump is None:
        return Decomposition(tuple(trunk), None, (), (), (), ())
    root = outward_closure(graph, stump)
    main = set(trunk) | set(root)
    remainder = neutral_saturation(graph, main) - main
    stump_generation = graph.atoms[stump].generation

    above = nx.Graph()
    above.add_nodes_from(a for a in remainder if graph.atoms[a].generation > stump_generation)
    for circle in graph.circles.values():
        if circle.inner_atom in above and circle.outer_atom in above:
            above.add_edge(circle.inner_atom, circle.outer_atom)
    trunks = []
    anchored = set()
    for circle_id in graph.atoms[stump].internal:
        partner = graph.circles[circle_id].outer_atom
        if partner in trunk:
            continue
        atoms = tuple(sorted(nx.node_connected_component(above, partner))) if partner in above else ()
        anchored.update(atoms)
        trunks.append(AuxiliaryTrunk(circle_id, atoms))
    for component in sorted(nx.connected_components(above), key=min):
        if not component & anchored:
            trunks.append(AuxiliaryTrunk(None, tuple(sorted(component))))

    return Decomposition(
        main_trunk=tuple(trunk),
        main_stump=stump,
        main_root=tuple(root),
        auxiliary_trunks=tuple(trunks),
        auxiliary_stumps=tuple(
            sorted(a for a in remainder if graph.atoms[a].generation == stump_generation)
        ),
        auxiliary_root=tuple(
            sorted(a for a in remainder if graph.atoms[a].generation < stump_generation)
        ),
    )
