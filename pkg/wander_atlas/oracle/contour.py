"""
This module samples tau on a grid and traces its level curves.

Quadratic maps use a cartesian window. Power maps use a log-polar grid with \
rows uniform in s = log(log|z|), so that equally spaced tau levels are \
equally spaced rows, and columns uniform in the angle. Its last column \
repeats the first one, and contour pieces meeting on that seam or on a chunk \
border of the threaded contour generator are joined by a union-find over \
their endpoints.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional
import numpy as np
import contourpy
from networkx.utils import UnionFind

from wander_atlas.core.config import get_config, thread_cap
from wander_atlas.core.errors import ResolutionWarning
from wander_atlas.core.model import Grid, HoloMap
from wander_atlas.oracle.holo import distance_to_critical, tau_grid

logger = logging.getLogger(__name__)

CRITICAL_MARGIN = 1e-3


@dataclass(frozen=True)
class GridField:
    """tau sampled on the nodes of a grid; NaN marks non-escaping nodes."""

    grid: Grid
    x: np.ndarray
    y: np.ndarray
    tau: np.ndarray

    @property
    def periodic(self) -> bool:
        return self.grid.kind == "logpolar"

    @property
    def shape(self) -> tuple:
        return self.tau.shape

    def locate(self, points: np.ndarray) -> tuple:
        """
        Nearest grid node of each point.

        Returns:
            tuple: (rows, cols, inside) integer arrays and a boolean mask.
        """
        points = np.asarray(points, dtype=complex)
        n_rows, n_cols = self.shape
        if self.periodic:
            r_min, r_max = self.grid.extent
            s_min, s_max = math.log(math.log(r_min)), math.log(math.log(r_max))
            radius = np.abs(points)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = np.log(np.log(radius))
            rows = np.rint((s - s_min) / (s_max - s_min) * (n_rows - 1))
            theta = np.mod(np.angle(points), 2 * math.pi)
            cols = np.rint(theta / (2 * math.pi) * (n_cols - 1)) % (n_cols - 1)
        else:
            x_min, x_max, y_min, y_max = self.grid.extent
            rows = np.rint((points.imag - y_min) / (y_max - y_min) * (n_rows - 1))
            cols = np.rint((points.real - x_min) / (x_max - x_min) * (n_cols - 1))
        inside = np.isfinite(rows) & np.isfinite(cols)
        inside &= (rows >= 0) & (rows < n_rows) & (cols >= 0) & (cols < n_cols)
        rows = np.where(inside, rows, 0).astype(int)
        cols = np.where(inside, cols, 0).astype(int)
        return rows, cols, inside

    def spacing_at(self, points: np.ndarray) -> float:
        """Largest distance between neighbouring grid nodes near `points`."""
        n_rows, n_cols = self.shape
        if not self.periodic:
            x_min, x_max, y_min, y_max = self.grid.extent
            return max((x_max - x_min) / (n_cols - 1), (y_max - y_min) / (n_rows - 1))
        r_min, r_max = self.grid.extent
        radius = float(np.mean(np.abs(points)))
        ds = (math.log(math.log(r_max)) - math.log(math.log(r_min))) / (n_rows - 1)
        return max(radius * 2 * math.pi / (n_cols - 1), radius * math.log(radius) * ds)


@dataclass(frozen=True)
class LevelTrace:
    """Closed level components of one tau level plus any open leftovers."""

    level: float
    loops: tuple
    open_pieces: tuple

    @property
    def count(self) -> int:
        return len(self.loops)


def make_grid(holo: HoloMap, t_min: float, t_max: float, resolution: Optional[int] = None) -> Grid:
    """
    A grid holding every level in [t_min, t_max].

    Args:
        holo (HoloMap): The map; its own grid wins when set.
        t_min (float): Lowest level (outermost curve).
        t_max (float): Highest level (innermost curves).
        resolution (int, optional): Nodes per side.

    Returns:
        Grid: log-polar for z^d, cartesian [-3, 3]^2 otherwise.
    """
    resolution = int(resolution or get_config()["WANDER_ATLAS_GRID"])
    if holo.grid is not None:
        return Grid(holo.grid.kind, holo.grid.extent, resolution)
    if holo.is_power:
        d = holo.kind.d
        r_max = 1.05 * math.exp(d ** (-t_min))
        r_min = 1.0 + 0.5 * (math.exp(d ** (-t_max)) - 1.0)
        return Grid("logpolar", (r_min, r_max), resolution)
    return Grid("cartesian", (-3.0, 3.0, -3.0, 3.0), resolution)


def grid_nodes(grid: Grid) -> tuple:
    """The x and y coordinate arrays of the grid nodes."""
    n = grid.resolution
    if grid.kind == "logpolar":
        r_min, r_max = grid.extent
        s = np.linspace(math.log(math.log(r_min)), math.log(math.log(r_max)), n)
        theta = np.linspace(0.0, 2 * math.pi, n)
        radius = np.exp(np.exp(s))[:, np.newaxis]
        x = radius * np.cos(theta)[np.newaxis, :]
        y = radius * np.sin(theta)[np.newaxis, :]
        x[:, -1] = x[:, 0]
        y[:, -1] = y[:, 0]
        return x, y
    x_min, x_max, y_min, y_max = grid.extent
    re = np.linspace(x_min, x_max, n)
    im = np.linspace(y_min, y_max, n)
    return np.broadcast_to(re[np.newaxis, :], (n, n)).copy(), np.broadcast_to(im[:, np.newaxis], (n, n)).copy()


def tau_field(holo: HoloMap, grid: Grid, threads: Optional[int] = None) -> GridField:
    """
    Samples tau on every grid node; row blocks run on a thread pool and are \
    stacked back in row order.
    """
    x, y = grid_nodes(grid)
    points = x + 1j * y
    workers = thread_cap(threads)
    blocks = np.array_split(np.arange(points.shape[0]), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda rows: tau_grid(holo, points[rows]), [b for b in blocks if b.size]))
    values = np.vstack(parts)
    if grid.kind == "logpolar":
        values[:, -1] = values[:, 0]
    logger.debug(
        "tau field %s: %d nodes, %d non-escaping", grid.kind, values.size, int(np.isnan(values).sum())
    )
    return GridField(grid, x, y, values)


def _key(point) -> tuple:
    return (round(float(point[0]), 9), round(float(point[1]), 9))


def merge_pieces(pieces: list) -> tuple:
    """
    Joins contour pieces that share endpoints.

    Returns:
        tuple: (closed loops, open polylines), each a list of (N, 2) arrays.
    """
    pieces = [p for p in pieces if len(p) >= 2]
    ends = UnionFind(range(len(pieces)))
    attached = {}
    for index, piece in enumerate(pieces):
        for side, point in ((0, piece[0]), (1, piece[-1])):
            attached.setdefault(_key(point), []).append((index, side))
    for members in attached.values():
        for index, _ in members[1:]:
            ends.union(members[0][0], index)
    loops, open_lines = [], []
    for members in sorted(sorted(group) for group in ends.to_sets()):
        used = {members[0]}
        line = pieces[members[0]]
        while True:
            tail = _key(line[-1])
            nxt = next(((i, s) for i, s in attached[tail] if i not in used), None)
            if nxt is None:
                break
            index, side = nxt
            used.add(index)
            piece = pieces[index] if side == 0 else pieces[index][::-1]
            line = np.vstack((line, piece[1:]))
        if len(used) == len(members) and _key(line[0]) == _key(line[-1]):
            loops.append(line)
        else:
            open_lines.append(line)
    return loops, open_lines


def trace_field(field: GridField, levels, threads: Optional[int] = None) -> list:
    """
    Traces several levels of one sampled field with a single contour generator.

    Returns:
        list: One LevelTrace per level, in the given order.

    Warns:
        ResolutionWarning: open components, or components whose extent is \
            within a few grid spacings.
    """
    workers = thread_cap(threads)
    generator = contourpy.contour_generator(
        x=field.x,
        y=field.y,
        z=np.ma.masked_invalid(field.tau),
        name="threaded" if workers > 1 else "serial",
        line_type=contourpy.LineType.Separate,
        chunk_count=workers if workers > 1 else None,
        thread_count=workers if workers > 1 else 0,
    )
    traces = []
    for level in levels:
        loops, open_lines = merge_pieces(list(generator.lines(level)))
        loops.sort(key=lambda loop: (round(float(loop[:, 1].mean()), 6), round(float(loop[:, 0].mean()), 6)))
        if open_lines:
            warnings.warn(
                ResolutionWarning(f"level {level:.6f}: {len(open_lines)} open contour pieces"),
                stacklevel=2,
            )
        for loop in loops:
            extent = float(np.ptp(loop, axis=0).max())
            if extent < 4 * field.spacing_at(loop[:, 0] + 1j * loop[:, 1]):
                warnings.warn(
                    ResolutionWarning(f"level {level:.6f}: a component spans only {extent:.2e}"),
                    stacklevel=2,
                )
                break
        traces.append(LevelTrace(level, tuple(loops), tuple(open_lines)))
    return traces


def trace_levels(
    holo: HoloMap, t: float, resolution: Optional[int] = None, threads: Optional[int] = None
) -> LevelTrace:
    """
    Connected components of the level curve tau = t inside the window.

    Args:
        holo (HoloMap): The map.
        t (float): A level at least 1e-3 away from every critical level.
        resolution (int, optional): Grid nodes per side.
        threads (int, optional): Worker cap.

    Returns:
        LevelTrace: closed polylines, one per component.
    """
    if distance_to_critical(holo, t) < CRITICAL_MARGIN:
        raise ValueError(f"level {t} lies within {CRITICAL_MARGIN} of a critical level")
    field = tau_field(holo, make_grid(holo, t, t, resolution), threads)
    trace = trace_field(field, [t], threads)[0]
    logger.info("level %.6f of %s: %d components", t, holo.describe(), trace.count)
    return trace


def level_components(trace: LevelTrace) -> list:
    """The closed components of a trace as complex arrays, one per component."""
    return [loop[:, 0] + 1j * loop[:, 1] for loop in trace.loops]


def escape_time_grid(holo: HoloMap, grid: Optional[Grid] = None, threads: Optional[int] = None) -> np.ndarray:
    """tau on the nodes of `grid` (the map's default window if None); NaN where the orbit stays bounded."""
    if grid is None:
        grid = holo.grid or make_grid(holo, -1.0, 1.0)
    return tau_field(holo, grid, threads).tau
