"""
This module enumerates and classifies the ideal boundary of a component.

Attractor-side ends (AIB) are the branches of the Reeb tree leaving through \
attractor-side frontier circles. Repeller-side ends (RIB) are seen at a \
finite depth as the connected components of the atoms lying beyond a \
generation; their count per generation is the branching table.

Classification follows the component topology theorem: without singular \
points both sides are a single end; with singular points the RIB is a Cantor \
set; the AIB is countable with isolated points exactly when some atom has \
more than one internal circle. Each class records whether it is backed by \
the theorem, by the finite branching data, or by both.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional
import networkx as nx

from wander_atlas.core.config import thread_cap
from wander_atlas.core.errors import Unclassifiable
from wander_atlas.core.model import (
    CANTOR,
    COUNTABLE_ISOLATED,
    ONE,
    AibEnd,
    AtomGraph,
    EndSpace,
    ReebTree,
    RibBranch,
)
from wander_atlas.engine.decompose import main_trunk
from wander_atlas.reeb.tree import build_reeb

logger = logging.getLogger(__name__)

THEOREM = "theorem"
EMPIRICAL = "empirical"
BOTH = "both"


@dataclass(frozen=True)
class EndCensus:
    """Ends visible at one truncation depth."""

    aib: tuple
    rib: tuple
    branching: dict


def rib_components(tree: ReebTree, generation: int, floor: int) -> list:
    """
    Components of the atoms with floor <= gen <= generation, each given as \
    the sorted list of its atom ids.
    """
    nodes = [
        n for n, data in tree.digraph.nodes(data=True) if floor <= data["generation"] <= generation
    ]
    sub = tree.digraph.subgraph(nodes)
    return sorted((sorted(c) for c in nx.weakly_connected_components(sub)), key=lambda c: c[0])


def enumerate_ends(tree: ReebTree, depth: int) -> EndCensus:
    """
    Census of the ends at truncation depth `depth`.

    Args:
        tree (ReebTree): The Reeb tree.
        depth (int): Truncation depth, at most the materialized depth.

    Returns:
        EndCensus: AIB frontier circles, RIB branches with canonical \
            addresses, and the branch count per generation.
    """
    generations = nx.get_node_attributes(tree.digraph, "generation")
    if not generations:
        return EndCensus((), (), {})
    floor = max(-depth, min(generations.values()))
    top = max(generations.values())
    aib = tuple(
        circle for atom, circle in tree.attractor_frontier if generations[atom] >= floor
    )
    branching = {}
    for generation in range(top, floor - 1, -1):
        branching[generation] = len(rib_components(tree, generation, floor))
    addresses = nx.get_node_attributes(tree.digraph, "address")
    rib = []
    for component in rib_components(tree, floor, floor):
        head = min(component)
        rib.append(RibBranch(address=addresses.get(head) or (), atom=head, branching_in=None))
    return EndCensus(aib, tuple(rib), branching)


def annulus_certificate(graph: AtomGraph, circle_id: int) -> tuple:
    """
    Orbit c, f(c), f^2(c), ... of an attractor-side frontier circle, ending \
    at the top circle of the main trunk.

    The region beyond c covers the region beyond each later circle, and the \
    last one bounds the main trunk above the base annulus. A covering of an \
    annulus is an annulus, so the region beyond c is an annular neighbourhood \
    holding exactly one end.
    """
    chain = [circle_id]
    image = graph.circles[circle_id].image_circle
    while image is not None and image in graph.circles and image not in chain:
        chain.append(image)
        image = graph.circles[image].image_circle
    return tuple(chain)


def branching_ancestor(graph: AtomGraph, atom_id: int) -> Optional[int]:
    """
    Smallest n such that the atom bounded outward by f^n of the first \
    external circle of `atom_id` has at least two external circles.
    """
    external = graph.atoms[atom_id].external
    if not external:
        return None
    circle_id, steps = external[0], 0
    while circle_id is not None and circle_id in graph.circles:
        owner = graph.circles[circle_id].outer_atom
        if owner is not None and len(graph.atoms[owner].external) >= 2:
            return steps
        circle_id = graph.circles[circle_id].image_circle
        steps += 1
    return None


def _increasing(counts: list) -> bool:
    return len(counts) >= 2 and all(b > a for a, b in zip(counts, counts[1:]))


def classify(graph: AtomGraph, threads: Optional[int] = None) -> EndSpace:
    """
    Classifies the end space of a validated graph.

    Raises:
        Unclassifiable: the graph does not reach strictly beyond its deepest \
            singular generation, so the stabilized regime is not visible.
    """
    if graph.depth < 1 or len(graph.atoms) < 2:
        raise Unclassifiable("the graph has no generation beyond the base annulus")
    singular = graph.singular_generations()
    bottom = graph.bottom_generation
    if singular and bottom >= singular[0]:
        raise Unclassifiable(
            f"deepest generation {bottom} does not lie beyond the deepest singular "
            f"generation {singular[0]}"
        )
    tree = build_reeb(graph)
    census = enumerate_ends(tree, graph.depth)
    trunk = tuple(main_trunk(graph))
    stump_generation = graph.atoms[trunk[-1]].generation - 1 if singular else 0

    aib = []
    for circle_id in census.aib:
        annulus = annulus_certificate(graph, circle_id)
        aib.append(AibEnd(circle_id, len(annulus) - 1, annulus))
    aib = tuple(aib)
    with ThreadPoolExecutor(max_workers=thread_cap(threads)) as pool:
        certificates = list(pool.map(lambda b: branching_ancestor(graph, b.atom), census.rib))
    rib = tuple(
        RibBranch(b.address, b.atom, cert) for b, cert in zip(census.rib, certificates)
    )

    branching = {stump_generation - g: n for g, n in census.branching.items() if g <= stump_generation}
    horizon = singular[0] if singular else 1
    stable = [n for g, n in sorted(census.branching.items(), reverse=True) if g < horizon]

    if singular:
        rib_class = CANTOR
        rib_backing = BOTH if _increasing(stable) and all(c is not None for c in certificates) else THEOREM
    else:
        rib_class = ONE
        rib_backing = BOTH if set(branching.values()) == {1} else THEOREM
    if any(len(a.internal) > 1 for a in graph.atoms.values()):
        aib_class = COUNTABLE_ISOLATED
        aib_backing = BOTH if len(aib) >= 2 else THEOREM
    else:
        aib_class = ONE
        aib_backing = BOTH if len(aib) == 1 else THEOREM

    logger.info("end space: AIB %s (%s), RIB %s (%s)", aib_class, aib_backing, rib_class, rib_backing)
    return EndSpace(
        aib=aib,
        rib=rib,
        aib_class=aib_class,
        rib_class=rib_class,
        certified_depth=stump_generation - bottom,
        branching=branching,
        aib_backing=aib_backing,
        rib_backing=rib_backing,
    )
