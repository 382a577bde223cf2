"""
This module evaluates the Lyapunov function tau = -log_d G of a polynomial \
map, where G is the Green's function of the basin of infinity, together with \
preimages, neutral sections and the tau-levels of the critical orbit.

For z^d the Green's function is log|z| in closed form. For z^2 + c the orbit \
is iterated to the escape radius, G is estimated as log|z_k| / 2^k and refined \
until successive estimates differ by less than green_tol.
"""

import cmath
import logging
import math
from dataclasses import dataclass
import numpy as np

from wander_atlas.core.errors import NonEscaping
from wander_atlas.core.model import HoloMap, PowerMap, QuadraticPlusC

logger = logging.getLogger(__name__)

# |z|**2 stays finite below this bound
_OVERFLOW_GUARD = 1e150


def power_map(d: int = 2, **kwargs) -> HoloMap:
    """HoloMap for z -> z**d."""
    return HoloMap(kind=PowerMap(d), **kwargs)


def quadratic_map(c: complex = 1.0, **kwargs) -> HoloMap:
    """HoloMap for z -> z**2 + c."""
    return HoloMap(kind=QuadraticPlusC(complex(c)), **kwargs)


def green(holo: HoloMap, z: complex) -> float:
    """
    Green's function of the basin of infinity at `z`.

    Raises:
        NonEscaping: the orbit stays bounded for max_iter steps.
    """
    z = complex(z)
    if holo.is_power:
        if abs(z) <= 1.0:
            raise NonEscaping(z, holo.max_iter)
        return math.log(abs(z))
    c = holo.kind.c
    w = z
    for k in range(holo.max_iter + 1):
        if abs(w) > holo.escape_radius:
            estimate = math.log(abs(w)) / 2**k
            while abs(w) < _OVERFLOW_GUARD:
                w = w * w + c
                k += 1
                refined = math.log(abs(w)) / 2**k
                if abs(refined - estimate) < holo.green_tol:
                    return refined
                estimate = refined
            return estimate
        w = w * w + c
    raise NonEscaping(z, holo.max_iter)


def tau(holo: HoloMap, z: complex) -> float:
    """
    tau(z) = -log_d G(z); satisfies tau(f(z)) = tau(z) - 1.

    Args:
        holo (HoloMap): The map.
        z (complex): A point of the basin of infinity.

    Returns:
        float: The tau value.
    """
    return -math.log(green(holo, z)) / math.log(holo.degree)


def tau_grid(holo: HoloMap, points: np.ndarray) -> np.ndarray:
    """
    Vectorized tau over an array of points; non-escaping points give NaN.
    """
    points = np.asarray(points, dtype=complex)
    out = np.full(points.shape, np.nan)
    if holo.is_power:
        radius = np.abs(points)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = -np.log(np.log(radius)) / math.log(holo.kind.d)
        np.copyto(out, values, where=radius > 1.0)
        return out
    c = holo.kind.c
    flat = points.ravel()
    result = out.ravel()
    active = np.arange(flat.size)
    w = flat.copy()
    for k in range(holo.max_iter + 1):
        escaped = np.abs(w) > holo.escape_radius
        if escaped.any():
            w_esc = w[escaped]
            # one refinement step; its correction is far below green_tol here
            w_next = w_esc * w_esc + c
            result[active[escaped]] = -np.log(np.log(np.abs(w_next)) / 2 ** (k + 1)) / math.log(2)
            active = active[~escaped]
            w = w[~escaped]
        if active.size == 0:
            break
        w = w * w + c
    return result.reshape(points.shape)


def preimages(holo: HoloMap, w: complex) -> list:
    """
    The d solutions of f(z) = w, repeated by multiplicity.
    """
    w = complex(w)
    if holo.is_power:
        d = holo.kind.d
        if w == 0:
            return [0j] * d
        radius = abs(w) ** (1.0 / d)
        angle = cmath.phase(w)
        return [cmath.rect(radius, (angle + 2 * math.pi * k) / d) for k in range(d)]
    root = cmath.sqrt(w - holo.kind.c)
    return [root, -root]


@dataclass(frozen=True)
class NeutralSection:
    """Points of f^-n(f^n(z)) with their Boettcher angles and diagnostics."""

    points: np.ndarray
    angles: np.ndarray
    max_gap: float
    tau: float
    tau_spread: float


def max_angular_gap(angles: np.ndarray) -> float:
    """Largest gap between consecutive angles on the circle."""
    ordered = np.sort(np.mod(angles, 2 * math.pi))
    if ordered.size < 2:
        return 2 * math.pi
    gaps = np.diff(np.append(ordered, ordered[0] + 2 * math.pi))
    return float(gaps.max())


def neutral_section(holo: HoloMap, z: complex, n: int) -> NeutralSection:
    """
    The neutral section of `z` at depth `n`: all points w with f^n(w) = f^n(z).

    Returns:
        NeutralSection: d**n points, the largest gap between their Boettcher \
            angles, and the spread of their tau values.

    Raises:
        NonEscaping: `z` is not in the basin of infinity.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    z = complex(z)
    level = tau(holo, z)
    if holo.is_power:
        d = holo.kind.d
        k = np.arange(d**n)
        angles = cmath.phase(z) + 2 * math.pi * k / d**n
        points = z * np.exp(2j * math.pi * k / d**n)
        values = tau_grid(holo, points)
    else:
        c = holo.kind.c
        w = z
        for _ in range(n):
            w = w * w + c
            if not cmath.isfinite(w) or abs(w) > _OVERFLOW_GUARD:
                raise ValueError(f"f^{n}(z) leaves double range; use a smaller n")
        points = np.array([w])
        angles = np.array([cmath.phase(w)])
        for _ in range(n):
            roots = np.sqrt(points - c)
            points = np.column_stack((roots, -roots)).ravel()
            halves = np.column_stack((angles / 2, angles / 2 + math.pi)).ravel()
            flipped = np.column_stack((angles / 2 + math.pi, angles / 2)).ravel()
            near = np.abs(np.angle(np.exp(1j * (halves - np.angle(points)))))
            angles = np.where(near <= math.pi / 2, halves, flipped)
        values = np.array([tau(holo, p) for p in points])
    spread = float(np.nanmax(values) - np.nanmin(values)) if values.size else 0.0
    logger.debug("neutral section of %s at depth %d: %d points", z, n, len(points))
    return NeutralSection(
        points=np.asarray(points),
        angles=np.mod(angles, 2 * math.pi),
        max_gap=max_angular_gap(np.asarray(angles)),
        tau=level,
        tau_spread=spread,
    )


def critical_escape_steps(holo: HoloMap) -> int:
    """
    Steps the critical orbit 0 -> c -> c^2 + c ... needs to leave the escape radius.

    Raises:
        NonEscaping: the critical orbit stays bounded.
    """
    c = holo.kind.c
    w = 0j
    for k in range(holo.max_iter + 1):
        if abs(w) > holo.escape_radius:
            return k
        w = w * w + c
    raise NonEscaping(0j, holo.max_iter)


def critical_levels(holo: HoloMap) -> list:
    """
    tau values of the forward critical orbit: tau(0), tau(0) - 1, ... until \
    the orbit leaves the escape radius. Empty for z^d.
    """
    if holo.is_power:
        return []
    steps = critical_escape_steps(holo)
    top = tau(holo, 0j)
    return [top - k for k in range(steps + 1)]


def distance_to_critical(holo: HoloMap, t: float) -> float:
    """
    Distance from `t` to the nearest level through a critical point of some \
    iterate f^n, i.e. to tau(0) + k for an integer k. Infinite for z^d.
    """
    if holo.is_power:
        return math.inf
    critical_escape_steps(holo)
    offset = t - tau(holo, 0j)
    return abs(offset - round(offset))
