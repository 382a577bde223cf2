"""
This module rebuilds an AtomGraph from the level curves of a concrete map.

Atoms are the grid-connected regions of the bands c - n - 1 < tau < c - n, \
circles are the closed components of the levels tau = c - L, and the action \
of the map on both is read off by pushing sample points forward and locating \
them again. Every assignment is a vote; a vote won by less than three \
quarters of the samples raises AmbiguousRegion, which makes the whole \
extraction retry on a finer grid.
"""

import logging
import math
import warnings
from collections import Counter
from dataclasses import replace
from typing import Optional
import numpy as np
from matplotlib.path import Path
from networkx.utils import UnionFind
from scipy import ndimage
from scipy.spatial import cKDTree

from wander_atlas.core.config import get_config
from wander_atlas.core.errors import AmbiguousRegion, ResolutionWarning, RoleContradiction
from wander_atlas.core.model import Atom, AtomGraph, Circle, HoloMap
from wander_atlas.engine.decompose import main_trunk
from wander_atlas.engine.roles import mark_main_auxiliary
from wander_atlas.engine.validate import validate
from wander_atlas.io.graph_file import infer_spec
from wander_atlas.oracle.contour import GridField, make_grid, tau_field, trace_field
from wander_atlas.oracle.holo import distance_to_critical, tau
from wander_atlas.utils.escalate import escalate

logger = logging.getLogger(__name__)

BASE_MARGIN = 0.05
VOTE_SHARE = 0.75
MIN_REGION_NODES = 16
INTERIOR_SAMPLES = 25
MAX_RESOLUTION = 4096


def default_level(holo: HoloMap) -> float:
    """Base constant c: -0.5 for z^d, half a level outside the critical point otherwise."""
    if holo.is_power:
        return -0.5
    return tau(holo, 0j) - 0.5


def check_level(holo: HoloMap, c: float) -> None:
    """
    Raises:
        ValueError: `c` is closer than BASE_MARGIN to a critical level, or the \
            base band would contain the critical point.
    """
    if distance_to_critical(holo, c) < BASE_MARGIN:
        raise ValueError(f"c = {c} lies within {BASE_MARGIN} of a critical level")
    if not holo.is_power and c > tau(holo, 0j) - BASE_MARGIN:
        raise ValueError(f"c = {c} puts the critical point inside the base annulus")


def resample(loop: np.ndarray, count: int) -> np.ndarray:
    """`count` points evenly spaced by arclength along a closed polyline, as complex numbers."""
    z = loop[:, 0] + 1j * loop[:, 1]
    if z[0] != z[-1]:
        z = np.append(z, z[0])
    lengths = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(z)))))
    targets = np.linspace(0.0, lengths[-1], count, endpoint=False)
    return np.interp(targets, lengths, z.real) + 1j * np.interp(targets, lengths, z.imag)


def interior_point(loop: np.ndarray) -> complex:
    """
    A point enclosed by a closed polyline, as far from it as a 31x31 lattice \
    over its bounding box (plus the centroid) allows.
    """
    path = Path(loop)
    low, high = loop.min(axis=0), loop.max(axis=0)
    gx, gy = np.meshgrid(np.linspace(low[0], high[0], 33)[1:-1], np.linspace(low[1], high[1], 33)[1:-1])
    candidates = np.vstack((loop.mean(axis=0), np.column_stack((gx.ravel(), gy.ravel()))))
    inside = candidates[path.contains_points(candidates)]
    if not len(inside):
        raise AmbiguousRegion("a level component encloses none of its sample points")
    clearance, _ = cKDTree(loop).query(inside)
    best = inside[int(np.argmax(clearance))]
    return complex(best[0], best[1])


@escalate("samples", 64, 1024, exception=ResolutionWarning)
def circle_winding(holo: HoloMap, loop: np.ndarray, centre: complex, samples: int = 64) -> int:
    """
    Degree of the map from a level component onto its image, counted as the \
    winding number of the image of `samples` points around `centre`.

    Warns:
        ResolutionWarning: consecutive image points turn by more than a quarter turn.
    """
    w = holo(resample(loop, samples)) - centre
    steps = np.angle(np.roll(w, -1) / w)
    if np.abs(steps).max() > math.pi / 2:
        warnings.warn(ResolutionWarning(f"winding ambiguous with {samples} samples"), stacklevel=2)
    return abs(int(round(steps.sum() / (2 * math.pi))))


def _winner(votes: Counter, candidates: set, what: str) -> Optional[int]:
    relevant = {k: v for k, v in votes.items() if k in candidates}
    if not relevant:
        return None
    best, count = max(relevant.items(), key=lambda kv: (kv[1], -kv[0]))
    share = count / sum(relevant.values())
    if share < VOTE_SHARE:
        raise AmbiguousRegion(f"{what}: best candidate {best} holds only {share:.0%} of the votes")
    return best


def label_regions(field: GridField, c: float, depth: int) -> tuple:
    """
    Labels the connected regions of every band, generation 0 first.

    Returns:
        tuple: (region map holding the atom id of every node or -1, list of \
            atom generations indexed by atom id)
    """
    with np.errstate(invalid="ignore"):
        band = np.floor(c - field.tau)
    region_map = np.full(field.shape, -1, dtype=int)
    positions = np.arange(region_map.size).reshape(field.shape)
    generations = []
    for generation in range(0, -depth - 1, -1):
        labels, count = ndimage.label(band == generation, structure=np.ones((3, 3), dtype=bool))
        if count == 0:
            raise AmbiguousRegion(f"band of generation {generation} has no grid nodes")
        merged = UnionFind(range(1, count + 1))
        if field.periodic:
            for left, right in zip(labels[:, 0], labels[:, -1]):
                if left and right:
                    merged.union(int(left), int(right))
        first = ndimage.minimum(positions, labels, np.arange(1, count + 1))
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        lookup = np.full(count + 1, -1, dtype=int)
        for members in sorted(map(sorted, merged.to_sets()), key=lambda m: min(first[k - 1] for k in m)):
            nodes = int(sum(sizes[k] for k in members))
            if nodes < MIN_REGION_NODES:
                warnings.warn(
                    ResolutionWarning(f"a region of generation {generation} covers only {nodes} nodes"),
                    stacklevel=2,
                )
            lookup[list(members)] = len(generations)
            generations.append(generation)
        region_map = np.where(labels > 0, lookup[labels], region_map)
    return region_map, generations


def _neighbour_votes(field: GridField, region_map: np.ndarray, loop: np.ndarray) -> Counter:
    rows, cols, inside = field.locate(loop[:, 0] + 1j * loop[:, 1])
    rows, cols = rows[inside], cols[inside]
    n_rows, n_cols = field.shape
    votes = Counter()
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            rr = np.clip(rows + dr, 0, n_rows - 1)
            cc = (cols + dc) % (n_cols - 1) if field.periodic else np.clip(cols + dc, 0, n_cols - 1)
            votes.update(region_map[rr, cc].tolist())
    votes.pop(-1, None)
    return votes


def _image_votes(holo: HoloMap, field: GridField, region_map: np.ndarray, box, atom_id: int) -> Counter:
    mask = np.pad(region_map[box] == atom_id, 1)
    clearance = ndimage.distance_transform_edt(mask)
    order = np.argsort(clearance, axis=None, kind="stable")[::-1][:INTERIOR_SAMPLES]
    rows, cols = np.unravel_index(order, mask.shape)
    keep = mask[rows, cols]
    rows, cols = rows[keep] - 1 + box[0].start, cols[keep] - 1 + box[1].start
    images = holo(field.x[rows, cols] + 1j * field.y[rows, cols])
    i_rows, i_cols, inside = field.locate(images)
    votes = Counter(region_map[i_rows[inside], i_cols[inside]].tolist())
    votes.pop(-1, None)
    return votes


@escalate("resolution", 2048, MAX_RESOLUTION)
def _extract(holo: HoloMap, c: float, depth: int, threads: Optional[int] = None, resolution: int = 2048) -> AtomGraph:
    field = tau_field(holo, make_grid(holo, c - 1, c + depth, resolution), threads)
    region_map, generations = label_regions(field, c, depth)
    if generations.count(0) != 1:
        raise AmbiguousRegion(f"the base band splits into {generations.count(0)} regions")
    by_generation = {}
    for atom_id, generation in enumerate(generations):
        by_generation.setdefault(generation, set()).add(atom_id)

    levels = list(range(1, -depth - 1, -1))
    traces = trace_field(field, [c - level for level in levels], threads)
    circles = []
    for level, trace in zip(levels, traces):
        for loop in trace.loops:
            votes = _neighbour_votes(field, region_map, loop)
            where = f"circle at level {level}"
            circles.append(
                {
                    "id": len(circles),
                    "level": level,
                    "loop": loop,
                    "inner": _winner(votes, by_generation.get(level - 1, set()), where),
                    "outer": _winner(votes, by_generation.get(level, set()), where),
                    "image": None,
                    "winding": None,
                }
            )

    for level in levels[1:]:
        targets = [circle for circle in circles if circle["level"] == level + 1]
        if not targets:
            raise AmbiguousRegion(f"level {level + 1} has no closed component")
        vertices = np.vstack([t["loop"] for t in targets])
        owners = np.concatenate([[t["id"]] * len(t["loop"]) for t in targets])
        tree = cKDTree(vertices)
        centres = {}
        for circle in (x for x in circles if x["level"] == level):
            w = holo(resample(circle["loop"], 64))
            _, nearest = tree.query(np.column_stack((w.real, w.imag)))
            image = _winner(Counter(owners[nearest].tolist()), {t["id"] for t in targets}, "image circle")
            if image not in centres:
                centres[image] = interior_point(circles[image]["loop"])
            circle["image"] = image
            circle["winding"] = circle_winding(holo, circle["loop"], centres[image])

    boxes = ndimage.find_objects(region_map + 1)
    atoms = {}
    for atom_id, generation in enumerate(generations):
        internal = tuple(x["id"] for x in circles if x["inner"] == atom_id)
        external = tuple(x["id"] for x in circles if x["outer"] == atom_id)
        image = None
        if generation < 0:
            votes = _image_votes(holo, field, region_map, boxes[atom_id], atom_id)
            image = _winner(votes, by_generation[generation + 1], f"image of atom {atom_id}")
        covered = len(atoms[image].external) if image is not None else 1
        cover = sum(circles[e]["winding"] for e in external) // max(1, covered)
        atoms[atom_id] = Atom(atom_id, generation, internal, external, (), image, max(1, cover))

    if not holo.is_power:
        rows, cols, inside = field.locate(np.array([0j]))
        if inside[0] and region_map[rows[0], cols[0]] >= 0:
            critical = int(region_map[rows[0], cols[0]])
            atoms[critical] = replace(atoms[critical], singular=(2,))

    base = atoms[0]
    for circle in circles:
        if circle["winding"] is None:
            circle["winding"] = base.cover_degree
    graph = AtomGraph(
        degree=holo.degree,
        atoms=atoms,
        circles={
            x["id"]: Circle(x["id"], x["level"], x["inner"], x["outer"], x["image"], x["winding"])
            for x in circles
        },
        base_chain=(0,),
        depth=depth,
    )
    graph = AtomGraph(graph.degree, graph.atoms, graph.circles, tuple(main_trunk(graph)), depth)
    try:
        graph = mark_main_auxiliary(graph)
    except RoleContradiction as error:
        logger.warning("extracted graph has no consistent roles: %s", error)
    report = validate(graph, threads=threads)
    if not report.ok:
        failed = ", ".join(r.rule for r in report.failed())
        raise AmbiguousRegion(
            f"depth {depth} is not resolved at resolution {resolution}: {failed} fail"
        )
    logger.info(
        "extracted %d atoms and %d circles from %s at resolution %d",
        len(graph.atoms), len(graph.circles), holo.describe(), resolution,
    )
    return AtomGraph(
        graph.degree, graph.atoms, graph.circles, graph.base_chain, depth, spec=infer_spec(graph)
    )


def extract_atom_graph(
    holo: HoloMap,
    c: Optional[float] = None,
    depth: int = 4,
    resolution: Optional[int] = None,
    threads: Optional[int] = None,
    max_resolution: int = MAX_RESOLUTION,
) -> AtomGraph:
    """
    Numerical atom decomposition of the basin of infinity down to `depth` \
    generations below the base annulus.

    Args:
        holo (HoloMap): The map.
        c (float, optional): Base constant; see default_level.
        depth (int, optional): Generations below the base, at least 1. Defaults to 4.
        resolution (int, optional): Starting grid resolution; doubled on \
            ambiguity up to `max_resolution`.
        threads (int, optional): Worker cap.
        max_resolution (int, optional): Largest grid tried. Defaults to MAX_RESOLUTION.

    Returns:
        AtomGraph: Atoms ordered by generation then grid position.

    Raises:
        AmbiguousRegion: a vote stays ambiguous at the largest resolution, or \
            the graph found there fails validate (the depth outruns the grid).
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    c = default_level(holo) if c is None else float(c)
    check_level(holo, c)
    start = int(resolution or get_config()["WANDER_ATLAS_GRID"])
    return _extract(
        holo, c, depth, threads=threads, resolution=start, max_resolution=min(max_resolution, MAX_RESOLUTION)
    )
