"""
This module defines the domain types of wander_atlas: the map specification \
(MapSpec, SingularEvent, AtomShape), the combinatorial model of a component \
(Circle, Atom, AtomGraph), the derived structures (ReebTree, EndSpace, \
ValidationReport) and the concrete polynomial maps used by the oracle \
(PowerMap, QuadraticPlusC, HoloMap, Grid).

All values are immutable after construction.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Union
import networkx as nx

from wander_atlas.core.errors import InfeasibleSpec, SpecFormatError

MAIN = "main"
AUXILIARY = "auxiliary"

ONE = "One"
COUNTABLE_ISOLATED = "CountableIsolated"
CANTOR = "Cantor"

STABILIZATION_RULES = ("homeomorphic",)


@dataclass(frozen=True)
class SingularEvent:
    """
    A singular point of local branching order `multiplicity`, placed in the \
    atom reached by `atom_address` from the base annulus.
    """

    atom_address: tuple
    multiplicity: int

    def __post_init__(self):
        object.__setattr__(self, "atom_address", tuple(int(i) for i in self.atom_address))
        if self.multiplicity < 2:
            raise SpecFormatError(
                f"multiplicity must be >= 2, got {self.multiplicity} "
                f"at {list(self.atom_address)}"
            )

    @property
    def defect(self) -> int:
        """Local defect b_p - 1."""
        return self.multiplicity - 1


@dataclass(frozen=True)
class AtomShape:
    """Forces the internal circle count and cover degree of a singular atom."""

    address: tuple
    internal: int = 1
    cover: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "address", tuple(int(i) for i in self.address))
        if self.internal < 1:
            raise SpecFormatError(f"shape at {list(self.address)} needs internal >= 1")
        if self.cover is not None and self.cover < 1:
            raise SpecFormatError(f"shape at {list(self.address)} needs cover >= 1")


@dataclass(frozen=True)
class MapSpec:
    """
    Finite presentation of an inner mapping restricted to one component.

    Args:
        degree (int): |deg f| on the component, at least 1.
        singular_events (tuple): SingularEvent values.
        trunk_windings (tuple): Windings of the preimage circles of the base \
            annulus' internal circle. The first one belongs to the main trunk, \
            the others to auxiliary trunks. Defaults to (degree,).
        shapes (tuple): AtomShape values for singular atoms.
        stabilization (str): Rule applied beyond the deepest event.
        label (str): Free text.
    """

    degree: int
    singular_events: tuple = ()
    trunk_windings: tuple = ()
    shapes: tuple = ()
    stabilization: str = "homeomorphic"
    label: str = ""

    def __post_init__(self):
        if int(self.degree) < 1:
            raise SpecFormatError(f"degree must be >= 1, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "singular_events", tuple(self.singular_events))
        object.__setattr__(self, "shapes", tuple(self.shapes))
        windings = tuple(int(w) for w in self.trunk_windings) or (self.degree,)
        object.__setattr__(self, "trunk_windings", windings)
        if min(windings) < 1 or sum(windings) != self.degree:
            raise InfeasibleSpec(
                "degree-conservation",
                f"trunk windings {list(windings)} do not partition degree {self.degree}",
            )
        if self.stabilization not in STABILIZATION_RULES:
            raise SpecFormatError(f"unknown stabilization rule {self.stabilization!r}")

    def events_at(self, address: tuple) -> list:
        """Multiplicities of the events placed at `address`."""
        return [e.multiplicity for e in self.singular_events if e.atom_address == address]

    def shape_at(self, address: tuple) -> Optional[AtomShape]:
        """The shape declared for `address`, if any."""
        return next((s for s in self.shapes if s.address == address), None)


@dataclass(frozen=True)
class Circle:
    """
    A gluing circle on the level curve tau = c - level.

    inner_atom has this circle in its internal list, outer_atom in its \
    external list. A missing partner marks the truncation frontier.
    """

    id: int
    level: int
    inner_atom: Optional[int]
    outer_atom: Optional[int]
    image_circle: Optional[int]
    winding: int

    @property
    def frontier(self) -> bool:
        return self.inner_atom is None or self.outer_atom is None


@dataclass(frozen=True)
class Atom:
    """One connected component of a tau-band of generation `generation`."""

    id: int
    generation: int
    internal: tuple
    external: tuple
    singular: tuple
    image_atom: Optional[int]
    cover_degree: int
    role: Optional[str] = None

    @property
    def boundary_type(self) -> tuple:
        return (len(self.internal), len(self.external))

    @property
    def euler(self) -> int:
        return 2 - (len(self.internal) + len(self.external))

    @property
    def defect(self) -> int:
        return sum(m - 1 for m in self.singular)

    @property
    def annular(self) -> bool:
        return self.boundary_type == (1, 1)


@dataclass(frozen=True)
class AtomGraph:
    """
    Finite-depth model of a component: atom and circle tables keyed by id, \
    the main trunk ladder and the truncation depth (minus the most negative \
    generation).
    """

    degree: int
    atoms: dict
    circles: dict
    base_chain: tuple
    depth: int
    spec: Optional[MapSpec] = field(default=None, compare=False)

    @property
    def base(self) -> Atom:
        return self.atoms[self.base_chain[0]]

    @property
    def bottom_generation(self) -> int:
        return min(a.generation for a in self.atoms.values())

    def atoms_at(self, generation: int) -> list:
        """Atoms of one generation, ordered by id."""
        return sorted(
            (a for a in self.atoms.values() if a.generation == generation),
            key=lambda a: a.id,
        )

    @cached_property
    def _preimage_index(self) -> dict:
        index = {}
        for atom in sorted(self.atoms.values(), key=lambda a: a.id):
            if atom.image_atom is not None and atom.image_atom != atom.id:
                index.setdefault(atom.image_atom, []).append(atom)
        return index

    def children(self, atom_id: int) -> list:
        """Materialized preimage atoms of `atom_id`, ordered by id."""
        return list(self._preimage_index.get(atom_id, []))

    def outward_neighbors(self, atom_id: int) -> list:
        """Atoms glued across the external circles of `atom_id`."""
        return [
            self.circles[c].inner_atom
            for c in self.atoms[atom_id].external
            if self.circles[c].inner_atom is not None
        ]

    def inward_neighbors(self, atom_id: int) -> list:
        """Atoms glued across the internal circles of `atom_id`."""
        return [
            self.circles[c].outer_atom
            for c in self.atoms[atom_id].internal
            if self.circles[c].outer_atom is not None
        ]

    def gluing_graph(self) -> nx.MultiGraph:
        """Atoms as nodes, non-frontier circles as keyed edges."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.atoms)
        for circle in self.circles.values():
            if not circle.frontier:
                graph.add_edge(circle.inner_atom, circle.outer_atom, key=circle.id)
        return graph

    def singular_generations(self) -> list:
        return sorted({a.generation for a in self.atoms.values() if a.singular})


@dataclass(frozen=True)
class RuleResult:
    """Outcome of one validation rule."""

    rule: str
    passed: bool
    offenders: tuple = ()
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Ordered rule outcomes of validate."""

    results: tuple

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> list:
        return [r for r in self.results if not r.passed]

    def by_rule(self, rule: str) -> RuleResult:
        return next(r for r in self.results if r.rule == rule)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "rules": [
                {
                    "rule": r.rule,
                    "status": "pass" if r.passed else "fail",
                    "offenders": list(r.offenders),
                    "detail": r.detail,
                }
                for r in self.results
            ],
        }


@dataclass(frozen=True)
class ReebTree:
    """
    Oriented Kronrod-Reeb tree. Edges run from the repeller-side atom to the \
    attractor-side atom of each non-frontier circle and carry its id.
    """

    digraph: nx.DiGraph
    attractor_frontier: tuple
    repeller_frontier: tuple

    @property
    def roots(self) -> list:
        """Attractor-side vertices, no out-edges."""
        return sorted(n for n, deg in self.digraph.out_degree() if deg == 0)

    @property
    def leaves(self) -> list:
        """Repeller-side tips, no in-edges."""
        return sorted(n for n, deg in self.digraph.in_degree() if deg == 0)


@dataclass(frozen=True)
class AibEnd:
    """
    Attractor-side end with its isolation certificate: `annulus` holds the \
    circle ids of the orbit from `circle` up to the main trunk top.
    """

    circle: int
    steps_to_trunk: int
    annulus: tuple


@dataclass(frozen=True)
class RibBranch:
    """Repeller-side frontier branch and its future branching certificate."""

    address: tuple
    atom: int
    branching_in: Optional[int]


@dataclass(frozen=True)
class EndSpace:
    """Census and classification of the ideal boundary."""

    aib: tuple
    rib: tuple
    aib_class: str
    rib_class: str
    certified_depth: int
    branching: dict = field(default_factory=dict)
    aib_backing: str = "theorem"
    rib_backing: str = "theorem"

    def to_json(self) -> dict:
        return {
            "aib_class": self.aib_class,
            "rib_class": self.rib_class,
            "aib_backing": self.aib_backing,
            "rib_backing": self.rib_backing,
            "certified_depth": self.certified_depth,
            "aib": [
                {"circle": e.circle, "steps_to_trunk": e.steps_to_trunk, "annulus": list(e.annulus)}
                for e in self.aib
            ],
            "rib": [
                {"address": list(b.address), "atom": b.atom, "branching_in": b.branching_in}
                for b in self.rib
            ],
            "branching": {str(k): v for k, v in sorted(self.branching.items())},
        }


@dataclass(frozen=True)
class PowerMap:
    """z -> z**d"""

    d: int = 2

    def __post_init__(self):
        if int(self.d) < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")


@dataclass(frozen=True)
class QuadraticPlusC:
    """z -> z**2 + c"""

    c: complex = 1.0


@dataclass(frozen=True)
class Grid:
    """
    Sampling window for contouring. `kind` is "cartesian" (extent is \
    (xmin, xmax, ymin, ymax)) or "logpolar" (extent is (r_min, r_max)).
    """

    kind: str = "cartesian"
    extent: tuple = (-3.0, 3.0, -3.0, 3.0)
    resolution: int = 2048


@dataclass(frozen=True)
class HoloMap:
    """A polynomial self-map of the sphere with its numerical parameters."""

    kind: Union[PowerMap, QuadraticPlusC]
    escape_radius: float = 1e6
    green_tol: float = 1e-10
    max_iter: int = 200
    grid: Optional[Grid] = None

    @property
    def degree(self) -> int:
        if isinstance(self.kind, PowerMap):
            return self.kind.d
        return 2

    @property
    def is_power(self) -> bool:
        return isinstance(self.kind, PowerMap)

    def __call__(self, z: Any) -> Any:
        if isinstance(self.kind, PowerMap):
            return z**self.kind.d
        return z * z + self.kind.c

    def describe(self) -> str:
        if isinstance(self.kind, PowerMap):
            return f"z^{self.kind.d}"
        return f"z^2+({self.kind.c})"
