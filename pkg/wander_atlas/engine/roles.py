"""
This module assigns main/auxiliary roles and checks forward chains.

An atom is main when it is reached from the base annulus by outward steps \
(across external circles). Everything else materialized is auxiliary.
"""

import logging
from collections import deque
from dataclasses import dataclass, replace

from wander_atlas.core.errors import NotAChain, RoleContradiction
from wander_atlas.core.model import AUXILIARY, MAIN, AtomGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainVerdict:
    """Outcome of chain_check."""

    chain: tuple
    mapped: tuple
    forward: bool
    propagated: bool

    @property
    def consistent(self) -> bool:
        """False when the last link maps but an earlier one does not."""
        return not self.mapped or not self.mapped[-1] or all(self.mapped)


def main_atoms(graph: AtomGraph) -> set:
    """Atoms reachable from the base annulus across external circles."""
    start = graph.base_chain[0]
    seen = {start}
    queue = deque([start])
    while queue:
        atom_id = queue.popleft()
        for neighbor in graph.outward_neighbors(atom_id):
            if neighbor not in seen:
                seen.add(neighbor)
                queue.append(neighbor)
    return seen


def mark_main_auxiliary(graph: AtomGraph) -> AtomGraph:
    """
    Returns a copy of `graph` with every atom's role filled in.

    Raises:
        RoleContradiction: f(main) is auxiliary, or a main atom does not have \
            exactly one main neighbour across its internal boundary.
    """
    main = main_atoms(graph)
    for atom_id in sorted(main):
        atom = graph.atoms[atom_id]
        image = atom.image_atom
        if image is not None and image in graph.atoms and image not in main:
            raise RoleContradiction(
                f"main atom {atom_id} maps onto auxiliary atom {image}"
            )
        inward = [n for n in graph.inward_neighbors(atom_id) if n in main]
        open_side = any(graph.circles[c].outer_atom is None for c in atom.internal)
        if len(inward) > 1 or (len(inward) == 0 and not open_side):
            raise RoleContradiction(
                f"main atom {atom_id} has {len(inward)} main neighbours across "
                "its internal boundary, expected exactly one"
            )
        outward = [n for n in graph.outward_neighbors(atom_id) if n not in main]
        if outward:
            raise RoleContradiction(
                f"atom {outward[0]} lies outside main atom {atom_id} but is auxiliary"
            )
    atoms = {
        atom_id: replace(atom, role=MAIN if atom_id in main else AUXILIARY)
        for atom_id, atom in graph.atoms.items()
    }
    logger.debug("%d main and %d auxiliary atoms", len(main), len(atoms) - len(main))
    return replace(graph, atoms=atoms)


def _adjacent(graph: AtomGraph, atom_a: int, atom_b: int) -> bool:
    return atom_b in graph.inward_neighbors(atom_a) or atom_b in graph.outward_neighbors(atom_a)


def chain_check(graph: AtomGraph, chain) -> ChainVerdict:
    """
    Checks that `chain` is a chain stepping one generation toward the \
    attractor per link, and which links are forward (f(A_i-1) = A_i).

    Args:
        graph (AtomGraph): The graph.
        chain (sequence): Atom ids, repeller side first.

    Returns:
        ChainVerdict: `forward` is true when every link maps; `propagated` is \
            true when the last link maps. Along trunk ladders a mapped last \
            link carries every earlier link with it; across a branching of \
            the root it need not (z^2 + 1: atom 0/0/1 is glued to 0/1 but \
            maps onto 0/0), and `consistent` reports which case holds.

    Raises:
        NotAChain: unknown atoms, non-adjacent links or a wrong generation step.
    """
    chain = tuple(chain)
    if not chain:
        raise NotAChain("empty chain")
    for atom_id in chain:
        if atom_id not in graph.atoms:
            raise NotAChain(f"atom {atom_id} does not exist")
    for prev, nxt in zip(chain, chain[1:]):
        if not _adjacent(graph, prev, nxt):
            raise NotAChain(f"atoms {prev} and {nxt} are not adjacent")
        if graph.atoms[nxt].generation != graph.atoms[prev].generation + 1:
            raise NotAChain(
                f"generation does not step by one from atom {prev} to atom {nxt}"
            )
    mapped = tuple(graph.atoms[prev].image_atom == nxt for prev, nxt in zip(chain, chain[1:]))
    verdict = ChainVerdict(
        chain=chain,
        mapped=mapped,
        forward=all(mapped),
        propagated=bool(mapped) and mapped[-1],
    )
    if not verdict.consistent:
        logger.info("chain %s: last link maps but %s do not", chain, mapped)
    return verdict
