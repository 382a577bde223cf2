"""
This module compares two atom graphs up to relabelling of their ids.
"""

import logging
from collections import Counter
import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

from wander_atlas.core.model import AtomGraph

logger = logging.getLogger(__name__)


def labelled_graph(graph: AtomGraph) -> nx.Graph:
    """
    Gluing graph whose nodes carry (generation, boundary type, sorted \
    multiplicities, cover degree, sorted frontier windings) and whose edges \
    carry the winding of the shared circle.
    """
    labelled = nx.Graph()
    for atom in graph.atoms.values():
        frontier = sorted(
            graph.circles[c].winding
            for c in atom.internal + atom.external
            if graph.circles[c].frontier
        )
        labelled.add_node(
            atom.id,
            label=(
                atom.generation,
                atom.boundary_type,
                tuple(sorted(atom.singular)),
                atom.cover_degree,
                tuple(frontier),
            ),
        )
    for circle in graph.circles.values():
        if not circle.frontier:
            labelled.add_edge(circle.inner_atom, circle.outer_atom, winding=circle.winding)
    return labelled


def crosscheck(first: AtomGraph, second: AtomGraph) -> tuple:
    """
    Labelled isomorphism test.

    Returns:
        tuple: (isomorphic, detail) where detail names the first difference found.
    """
    a, b = labelled_graph(first), labelled_graph(second)
    if a.number_of_nodes() != b.number_of_nodes():
        return False, f"atom counts differ: {a.number_of_nodes()} vs {b.number_of_nodes()}"
    if a.number_of_edges() != b.number_of_edges():
        return False, f"glued circle counts differ: {a.number_of_edges()} vs {b.number_of_edges()}"
    labels_a = Counter(nx.get_node_attributes(a, "label").values())
    labels_b = Counter(nx.get_node_attributes(b, "label").values())
    if labels_a != labels_b:
        missing = sorted(map(str, (labels_a - labels_b) + (labels_b - labels_a)))
        return False, f"atom labels differ: {', '.join(missing[:4])}"
    same = nx.is_isomorphic(
        a,
        b,
        node_match=categorical_node_match("label", None),
        edge_match=categorical_edge_match("winding", None),
    )
    logger.info("crosscheck of %d atoms: %s", a.number_of_nodes(), "isomorphic" if same else "different")
    return same, "isomorphic" if same else "gluing patterns differ"
