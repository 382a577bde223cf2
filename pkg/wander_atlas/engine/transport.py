"""Boundary types of atoms and the rules transporting them along f."""

from wander_atlas.core.errors import TransportViolation
from wander_atlas.core.model import AtomGraph


def transport_violations(graph: AtomGraph) -> list:
    """
    Checks every atom with a materialized image against the transport rules.

    Returns:
        list: (atom id, image atom id, reason) triples, empty when all hold.
    """
    violations = []
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        image = graph.atoms.get(atom.image_atom) if atom.image_atom is not None else None
        if image is None:
            continue
        kind, image_kind = atom.boundary_type, image.boundary_type
        if not atom.singular and image_kind == (1, 1):
            if kind != (1, 1):
                violations.append(
                    (atom.id, image.id, f"type {kind} without singular points over an annulus")
                )
        elif not atom.singular:
            if kind != image_kind:
                violations.append(
                    (atom.id, image.id, f"type {kind} differs from image type {image_kind}")
                )
            elif atom.cover_degree != 1:
                violations.append(
                    (atom.id, image.id, f"cover degree {atom.cover_degree} onto type {image_kind}")
                )
        elif kind[0] <= image_kind[0] and kind[1] <= image_kind[1]:
            violations.append(
                (atom.id, image.id, f"singular atom of type {kind} does not grow {image_kind}")
            )
    return violations


def classify_types(graph: AtomGraph) -> dict:
    """
    Computes the boundary type (a, b) of every atom and checks transport.

    Args:
        graph (AtomGraph): A graph whose f-action is valid.

    Returns:
        dict: atom id -> (a, b).

    Raises:
        TransportViolation: naming every offending atom pair.
    """
    violations = transport_violations(graph)
    if violations:
        raise TransportViolation(violations)
    return {atom_id: atom.boundary_type for atom_id, atom in sorted(graph.atoms.items())}
