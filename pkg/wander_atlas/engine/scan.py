"""
This module scans a graph for the backward patterns that would force \
infinitely many singular points.
"""

from dataclasses import dataclass

from wander_atlas.core.model import MAIN, AtomGraph
from wander_atlas.engine.roles import main_atoms

INFINITE_SINGULAR = "infinitely-many-singular-points"
DEEP_HOMEOMORPHISM = "deep-homeomorphism"


@dataclass(frozen=True)
class ScanFinding:
    rule: str
    atoms: tuple
    detail: str


def _is_main(graph: AtomGraph, main: set, atom_id: int) -> bool:
    role = graph.atoms[atom_id].role
    return role == MAIN if role is not None else atom_id in main


def _backward_children(graph: AtomGraph, atom_id: int) -> list:
    return [
        n for n in graph.outward_neighbors(atom_id) if graph.atoms[n].image_atom == atom_id
    ]


def infeasibility_scan(graph: AtomGraph) -> list:
    """
    Flags main backward chains that start at a type (1, *) atom and continue \
    with type (a, 1), a > 1, atoms all the way to the repeller frontier, and \
    deepest main atoms that are not mapped homeomorphically although every \
    singular event lies above them.

    Returns:
        list: ScanFinding values, empty for a clean graph.
    """
    findings = []
    main = main_atoms(graph)
    bottom = graph.bottom_generation
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        if not _is_main(graph, main, atom.id) or atom.boundary_type[0] != 1:
            continue
        for child in _backward_children(graph, atom.id):
            chain = [atom.id]
            current = child
            while True:
                a, b = graph.atoms[current].boundary_type
                if not (b == 1 and a > 1 and _is_main(graph, main, current)):
                    break
                chain.append(current)
                if graph.atoms[current].generation == bottom:
                    findings.append(
                        ScanFinding(
                            INFINITE_SINGULAR,
                            tuple(chain),
                            f"backward chain from type (1,{atom.boundary_type[1]}) atom "
                            f"{atom.id} continues with type (a,1) atoms to the frontier",
                        )
                    )
                    break
                nxt = _backward_children(graph, current)
                if not nxt:
                    break
                current = nxt[0]
    singular = graph.singular_generations()
    if singular and bottom < singular[0]:
        for atom in graph.atoms_at(bottom):
            if _is_main(graph, main, atom.id) and atom.cover_degree > 1:
                findings.append(
                    ScanFinding(
                        DEEP_HOMEOMORPHISM,
                        (atom.id,),
                        f"atom {atom.id} below every singular event covers its image "
                        f"with degree {atom.cover_degree}",
                    )
                )
    return findings
