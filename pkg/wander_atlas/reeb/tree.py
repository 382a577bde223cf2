"""
This module builds the oriented Kronrod-Reeb tree of tau from an AtomGraph \
and writes it as DOT text.

Each atom is a vertex labelled "(a,b)@gen". Each glued circle is an edge \
from the atom that has it as internal boundary to the atom that has it as \
external boundary, so edges point toward the attractor and an atom of type \
(a, b) has a out-edges and b in-edges.
"""

import logging
import networkx as nx

from wander_atlas.core.errors import CycleDetected
from wander_atlas.core.model import AtomGraph, ReebTree
from wander_atlas.engine.generate import atom_addresses

logger = logging.getLogger(__name__)


def vertex_label(boundary_type: tuple, generation: int) -> str:
    return f"({boundary_type[0]},{boundary_type[1]})@{generation}"


def build_reeb(graph: AtomGraph) -> ReebTree:
    """
    Builds the Reeb tree of a validated graph.

    Raises:
        CycleDetected: the gluing graph is not a forest.
    """
    digraph = nx.DiGraph()
    addresses = atom_addresses(graph)
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        digraph.add_node(
            atom.id,
            label=vertex_label(atom.boundary_type, atom.generation),
            generation=atom.generation,
            boundary_type=atom.boundary_type,
            address=addresses.get(atom.id),
        )
    attractor, repeller = [], []
    for circle in sorted(graph.circles.values(), key=lambda c: c.id):
        if circle.outer_atom is None and circle.inner_atom is not None:
            attractor.append((circle.inner_atom, circle.id))
        elif circle.inner_atom is None and circle.outer_atom is not None:
            repeller.append((circle.outer_atom, circle.id))
        elif circle.inner_atom is not None:
            if digraph.has_edge(circle.inner_atom, circle.outer_atom):
                raise CycleDetected(
                    f"atoms {circle.inner_atom} and {circle.outer_atom} share more than one circle"
                )
            digraph.add_edge(circle.inner_atom, circle.outer_atom, circle=circle.id, winding=circle.winding)
    if digraph.number_of_nodes() and not nx.is_forest(digraph):
        cycle = nx.find_cycle(digraph.to_undirected())
        raise CycleDetected(f"gluing cycle through atoms {sorted({u for u, _ in cycle})}")
    logger.debug("reeb tree: %d vertices, %d edges", digraph.number_of_nodes(), digraph.number_of_edges())
    return ReebTree(digraph, tuple(attractor), tuple(repeller))


def reeb_summary(tree: ReebTree) -> dict:
    """Vertex, edge, root and leaf counts."""
    return {
        "vertices": tree.digraph.number_of_nodes(),
        "edges": tree.digraph.number_of_edges(),
        "roots": len(tree.roots),
        "leaves": len(tree.leaves),
        "attractor_frontier": len(tree.attractor_frontier),
        "repeller_frontier": len(tree.repeller_frontier),
    }


def export_dot(tree: ReebTree, name: str = "reeb") -> str:
    """
    Writes the tree as a DOT digraph, edges oriented toward the attractor.

    Args:
        tree (ReebTree): Any tree, including an empty one.
        name (str, optional): Graph name. Defaults to "reeb".

    Returns:
        str: The DOT text.
    """
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    for node, data in tree.digraph.nodes(data=True):
        lines.append(f'  a{node} [label="{data["label"]}"];')
    for source, target, data in tree.digraph.edges(data=True):
        lines.append(f'  a{source} -> a{target} [label="{data["winding"]}", circle={data["circle"]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
