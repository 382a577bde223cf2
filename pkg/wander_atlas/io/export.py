"""
This module turns results into files: JSON census documents, CSV tables \
through pandas, and SVG drawings of level curves through matplotlib.
"""

import io
import json
import logging
from typing import Any, Optional
import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from wander_atlas.core.model import AtomGraph, EndSpace  # noqa: E402
from wander_atlas.engine.generate import atom_addresses  # noqa: E402
from wander_atlas.utils.extract import format_address  # noqa: E402

logger = logging.getLogger(__name__)


def serialize(obj: Any) -> str:
    """
    Text payload of a result.

    DataFrames become CSV, objects with a `to_json` method and plain \
    containers become indented JSON, strings pass through.
    """
    if isinstance(obj, str):
        return obj
    if isinstance(obj, pd.DataFrame):
        return obj.to_csv(index=False)
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    return json.dumps(obj, indent=2) + "\n"


def write_artifact(obj: Any, path: str) -> None:
    """Writes `obj` to `path` using serialize."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize(obj))
    logger.info("wrote %s", path)


def export_census_json(end_space: EndSpace) -> str:
    return serialize(end_space)


def escape_frame(x: np.ndarray, y: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    """One row per grid node: coordinates and tau, empty where the orbit stays bounded."""
    return pd.DataFrame({"x": x.ravel(), "y": y.ravel(), "tau": values.ravel()})


def branching_frame(end_space: EndSpace) -> pd.DataFrame:
    """Branching table: generation offset beyond the stump and branch count."""
    rows = sorted(end_space.branching.items())
    return pd.DataFrame(rows, columns=["offset", "branches"])


def atoms_frame(graph: AtomGraph) -> pd.DataFrame:
    addresses = atom_addresses(graph)
    return pd.DataFrame(
        [
            {
                "id": atom.id,
                "address": format_address(addresses.get(atom.id, ())),
                "generation": atom.generation,
                "internal": len(atom.internal),
                "external": len(atom.external),
                "cover_degree": atom.cover_degree,
                "singular": " ".join(str(m) for m in atom.singular),
                "image": atom.image_atom,
                "role": atom.role,
            }
            for atom in sorted(graph.atoms.values(), key=lambda a: a.id)
        ]
    )


def export_csv(table: pd.DataFrame, path: Optional[str] = None) -> str:
    """CSV text of `table`, also written to `path` when given."""
    text = serialize(table)
    if path:
        write_artifact(text, path)
    return text


def polylines_json(traces: list) -> str:
    """Level components as JSON: one entry per level with [[x, y], ...] arrays."""
    return serialize(
        [
            {
                "level": trace.level,
                "components": [loop.tolist() for loop in trace.loops],
                "open": [line.tolist() for line in trace.open_pieces],
            }
            for trace in traces
        ]
    )


def export_svg(traces: list, path: Optional[str] = None, title: str = "") -> str:
    """
    Draws the closed components of every trace, one colour per level.

    Returns:
        str: The SVG document, also written to `path` when given.
    """
    figure, axes = plt.subplots(figsize=(6, 6))
    colours = plt.get_cmap("viridis")
    for index, trace in enumerate(traces):
        colour = colours(index / max(1, len(traces) - 1))
        for loop in trace.loops:
            axes.plot(loop[:, 0], loop[:, 1], color=colour, linewidth=0.8)
    axes.set_aspect("equal")
    axes.set_title(title)
    buffer = io.StringIO()
    figure.savefig(buffer, format="svg")
    plt.close(figure)
    text = buffer.getvalue()
    if path:
        write_artifact(text, path)
    return text
