"""
This module parses map specifications written in YAML or JSON, e.g.

    degree: 2
    label: z^2+1
    events:
      - address: "0"
        mult: 2

Field names are matched loosely (`singular_events`, `singularEvents`, \
`multiplicity`, ...) and addresses may be written "0/1/0", "0.1.0" or as lists.
"""

from typing import Any
import yaml

from wander_atlas.core.errors import SpecFormatError
from wander_atlas.core.model import AtomShape, MapSpec, SingularEvent
from wander_atlas.utils.extract import extract_address, format_address
from wander_atlas.utils.parser import search_field, unknown_fields

SPEC_FIELDS = {
    "degree": ["degree", "deg", "d"],
    "events": ["events", "singular_events", "singular points"],
    "trunk_windings": ["trunk_windings", "trunks"],
    "shapes": ["shapes", "atom_shapes"],
    "stabilization": ["stabilization", "stabilisation"],
    "label": ["label", "name"],
}

EVENT_FIELDS = {
    "address": ["address", "atom_address", "at"],
    "mult": ["mult", "multiplicity", "order"],
}

SHAPE_FIELDS = {
    "address": ["address", "atom_address", "at"],
    "internal": ["internal", "internal_circles"],
    "cover": ["cover", "cover_degree"],
}


def _address(item: dict) -> tuple:
    raw = search_field(item, EVENT_FIELDS["address"])
    address = extract_address(raw)
    if address is None:
        raise SpecFormatError(f"cannot read address {raw!r}")
    return address


def _check_fields(obj: Any, known: dict, where: str) -> None:
    if not isinstance(obj, dict):
        raise SpecFormatError(f"{where} must be a mapping, got {type(obj).__name__}")
    extra = unknown_fields(obj, known)
    if extra:
        raise SpecFormatError(f"unknown fields in {where}: {', '.join(map(str, extra))}")


def spec_from_dict(obj: dict) -> MapSpec:
    """
    Builds a MapSpec from a parsed document.

    Raises:
        SpecFormatError: missing degree, unknown fields or unreadable addresses.
    """
    _check_fields(obj, SPEC_FIELDS, "spec")
    degree = search_field(obj, SPEC_FIELDS["degree"])
    if degree is None:
        raise SpecFormatError("spec has no degree")
    events = []
    for item in search_field(obj, SPEC_FIELDS["events"], []) or []:
        _check_fields(item, EVENT_FIELDS, "event")
        mult = search_field(item, EVENT_FIELDS["mult"])
        if mult is None:
            raise SpecFormatError(f"event at {item} has no multiplicity")
        events.append(SingularEvent(_address(item), int(mult)))
    shapes = []
    for item in search_field(obj, SPEC_FIELDS["shapes"], []) or []:
        _check_fields(item, SHAPE_FIELDS, "shape")
        cover = search_field(item, SHAPE_FIELDS["cover"])
        shapes.append(
            AtomShape(
                _address(item),
                internal=int(search_field(item, SHAPE_FIELDS["internal"], 1)),
                cover=None if cover is None else int(cover),
            )
        )
    return MapSpec(
        degree=int(degree),
        singular_events=tuple(events),
        trunk_windings=tuple(search_field(obj, SPEC_FIELDS["trunk_windings"], []) or []),
        shapes=tuple(shapes),
        stabilization=search_field(obj, SPEC_FIELDS["stabilization"], "homeomorphic"),
        label=str(search_field(obj, SPEC_FIELDS["label"], "")),
    )


def spec_to_dict(spec: MapSpec) -> dict:
    obj = {"degree": spec.degree, "label": spec.label}
    obj["events"] = [
        {"address": format_address(e.atom_address), "mult": e.multiplicity}
        for e in spec.singular_events
    ]
    if spec.trunk_windings != (spec.degree,):
        obj["trunk_windings"] = list(spec.trunk_windings)
    if spec.shapes:
        obj["shapes"] = [
            {"address": format_address(s.address), "internal": s.internal, "cover": s.cover}
            for s in spec.shapes
        ]
    return obj


def loads_spec(text: str) -> MapSpec:
    """Parses YAML (a superset of JSON) text into a MapSpec."""
    try:
        obj = yaml.safe_load(text)
    except yaml.YAMLError as error:
        raise SpecFormatError(f"cannot parse spec: {error}") from error
    return spec_from_dict(obj)


def read_spec(path: str) -> MapSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_spec(handle.read())
