"""
This module reads and writes the AtomGraph JSON document. Field names are \
normative and unknown fields are rejected by the schema. Derived fields \
(roles, Euler characteristics, the map spec) are recomputed on parsing.
"""

import json
import logging
from typing import Optional, Union
import jsonschema

from wander_atlas.core.errors import GraphFormatError, RoleContradiction, WanderAtlasError
from wander_atlas.core.model import Atom, AtomGraph, AtomShape, Circle, MapSpec, SingularEvent
from wander_atlas.engine.generate import atom_addresses
from wander_atlas.engine.roles import mark_main_auxiliary

logger = logging.getLogger(__name__)

_ID = {"type": "integer", "minimum": 0}
_OPTIONAL_ID = {"type": ["integer", "null"], "minimum": 0}

GRAPH_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["degree", "atoms", "circles", "base_chain", "depth"],
    "properties": {
        "degree": {"type": "integer", "minimum": 1},
        "depth": {"type": "integer", "minimum": 0},
        "base_chain": {"type": "array", "items": _ID, "minItems": 1},
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": [
                    "id", "generation", "internal", "external", "singular", "image", "cover_degree",
                ],
                "properties": {
                    "id": _ID,
                    "generation": {"type": "integer"},
                    "internal": {"type": "array", "items": _ID},
                    "external": {"type": "array", "items": _ID},
                    "singular": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["mult"],
                            "properties": {"mult": {"type": "integer", "minimum": 1}},
                        },
                    },
                    "image": _OPTIONAL_ID,
                    "cover_degree": {"type": "integer", "minimum": 1},
                },
            },
        },
        "circles": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "level", "inner_atom", "outer_atom", "image_circle", "winding"],
                "properties": {
                    "id": _ID,
                    "level": {"type": "integer"},
                    "inner_atom": _OPTIONAL_ID,
                    "outer_atom": _OPTIONAL_ID,
                    "image_circle": _OPTIONAL_ID,
                    "winding": {"type": "integer", "minimum": 1},
                },
            },
        },
    },
}


def graph_to_dict(graph: AtomGraph) -> dict:
    """Returns the JSON-ready document of `graph`, atoms and circles ordered by id."""
    return {
        "degree": graph.degree,
        "atoms": [
            {
                "id": atom.id,
                "generation": atom.generation,
                "internal": list(atom.internal),
                "external": list(atom.external),
                "singular": [{"mult": m} for m in atom.singular],
                "image": atom.image_atom,
                "cover_degree": atom.cover_degree,
            }
            for atom in sorted(graph.atoms.values(), key=lambda a: a.id)
        ],
        "circles": [
            {
                "id": circle.id,
                "level": circle.level,
                "inner_atom": circle.inner_atom,
                "outer_atom": circle.outer_atom,
                "image_circle": circle.image_circle,
                "winding": circle.winding,
            }
            for circle in sorted(graph.circles.values(), key=lambda c: c.id)
        ],
        "base_chain": list(graph.base_chain),
        "depth": graph.depth,
    }


def infer_spec(graph: AtomGraph) -> Optional[MapSpec]:
    """
    Reconstructs the MapSpec that generates `graph`: singular events and \
    shapes at the preimage-tree addresses of singular atoms, and trunk \
    windings from the preimage circles of the base's internal circle.

    Returns:
        MapSpec or None: None when the graph has no such presentation.
    """
    try:
        addresses = atom_addresses(graph)
        events, shapes = [], []
        for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
            if not atom.singular:
                continue
            address = addresses[atom.id]
            events.extend(SingularEvent(address, m) for m in atom.singular)
            shapes.append(AtomShape(address, internal=len(atom.internal), cover=atom.cover_degree))
        base = graph.base
        top = base.internal[0] if base.internal else None
        windings = [
            c.winding
            for c in sorted(graph.circles.values(), key=lambda c: c.id)
            if top is not None and c.image_circle == top
        ]
        return MapSpec(
            degree=graph.degree,
            singular_events=tuple(events),
            trunk_windings=tuple(windings),
            shapes=tuple(shapes),
        )
    except (KeyError, IndexError, WanderAtlasError) as error:
        logger.debug("graph has no spec presentation: %s", error)
        return None


def graph_from_dict(obj: dict) -> AtomGraph:
    """
    Builds an AtomGraph from a parsed document.

    Raises:
        GraphFormatError: the document does not match the schema or repeats ids.
    """
    try:
        jsonschema.validate(obj, GRAPH_SCHEMA)
    except jsonschema.ValidationError as error:
        path = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise GraphFormatError(f"{path}: {error.message}") from error
    atoms = {}
    for item in obj["atoms"]:
        if item["id"] in atoms:
            raise GraphFormatError(f"duplicate atom id {item['id']}")
        atoms[item["id"]] = Atom(
            id=item["id"],
            generation=item["generation"],
            internal=tuple(item["internal"]),
            external=tuple(item["external"]),
            singular=tuple(s["mult"] for s in item["singular"]),
            image_atom=item["image"],
            cover_degree=item["cover_degree"],
        )
    circles = {}
    for item in obj["circles"]:
        if item["id"] in circles:
            raise GraphFormatError(f"duplicate circle id {item['id']}")
        circles[item["id"]] = Circle(**item)
    if any(a not in atoms for a in obj["base_chain"]):
        raise GraphFormatError("base_chain names an unknown atom")
    graph = AtomGraph(
        degree=obj["degree"],
        atoms=atoms,
        circles=circles,
        base_chain=tuple(obj["base_chain"]),
        depth=obj["depth"],
    )
    try:
        graph = mark_main_auxiliary(graph)
    except (RoleContradiction, KeyError) as error:
        logger.debug("roles left unset: %s", error)
    return AtomGraph(
        degree=graph.degree,
        atoms=graph.atoms,
        circles=graph.circles,
        base_chain=graph.base_chain,
        depth=graph.depth,
        spec=infer_spec(graph),
    )


def dumps_graph(graph: AtomGraph) -> str:
    """Serializes deterministically."""
    return json.dumps(graph_to_dict(graph), indent=2) + "\n"


def loads_graph(text: Union[str, bytes]) -> AtomGraph:
    try:
        obj = json.loads(text)
    except ValueError as error:
        raise GraphFormatError(f"not a JSON document: {error}") from error
    return graph_from_dict(obj)


def write_graph(graph: AtomGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_graph(graph))


def read_graph(path: str) -> AtomGraph:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_graph(handle.read())
