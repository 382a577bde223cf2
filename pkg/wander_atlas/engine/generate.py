"""
This module builds an AtomGraph from a MapSpec. The base annulus is \
generation 0; every further generation is the set of preimage atoms of the \
one above it, so the materialized set is the union of the preimages \
f^-l(base) for l = 0 .. depth.

Children of an atom B are lifted over the preimage circles ("slots") of B's \
internal circles. A child either carries the singular events declared at its \
address or is lifted without singular points. Planarity of every lift is \
tracked with a union-find over the components built so far.
"""

import logging
from collections import deque
from typing import Optional
import networkx as nx
from networkx.utils import UnionFind

from wander_atlas.core.errors import AddressError, InfeasibleSpec, RoleContradiction
from wander_atlas.core.model import Atom, AtomGraph, Circle, MapSpec
from wander_atlas.engine.roles import mark_main_auxiliary
from wander_atlas.utils.extract import format_address

logger = logging.getLogger(__name__)


def balanced_partition(total: int, parts: int) -> list:
    """
    Splits `total` into `parts` positive integers differing by at most one, \
    larger ones first.
    """
    quotient, remainder = divmod(total, parts)
    return [quotient + 1] * remainder + [quotient] * (parts - remainder)


def main_stump_depth(spec: MapSpec) -> int:
    """Length of the shallowest all-zero event address, 0 without events."""
    depths = [
        len(e.atom_address)
        for e in spec.singular_events
        if all(i == 0 for i in e.atom_address)
    ]
    return min(depths) if depths else 0


def check_spec(spec: MapSpec) -> None:
    """
    Rejects specs that no component of strict wandering can realize.

    Raises:
        InfeasibleSpec: naming the violated rule.
        AddressError: for an event placed on the base annulus.
    """
    events = spec.singular_events
    if spec.degree == 1 and events:
        raise InfeasibleSpec(
            "homeomorphism-has-no-singular-points",
            "a degree 1 map is a homeomorphism and cannot carry singular events",
        )
    for event in events:
        if len(event.atom_address) == 0:
            raise AddressError("the base annulus cannot carry singular points")
        if event.multiplicity > spec.degree:
            raise InfeasibleSpec(
                "riemann-hurwitz",
                f"multiplicity {event.multiplicity} at {format_address(event.atom_address)} "
                f"exceeds degree {spec.degree}",
            )
    if len(events) == 1 and events[0].multiplicity != spec.degree:
        raise InfeasibleSpec(
            "single-singular-degree",
            f"a single singular point must have multiplicity {spec.degree}, "
            f"got {events[0].multiplicity}",
        )
    if events and main_stump_depth(spec) == 0:
        raise InfeasibleSpec("no-main-stump", "no singular event lies on the main trunk 0/0/...")
    if len(spec.trunk_windings) > 1:
        if not events:
            raise InfeasibleSpec(
                "annulus-admits-no-auxiliary-trunk",
                "without singular points the component is an annulus with a single trunk",
            )
        if main_stump_depth(spec) != 1:
            raise InfeasibleSpec(
                "disconnected-auxiliary-trunk",
                "auxiliary trunks must join the main stump at address 0",
            )
    for shape in spec.shapes:
        if not spec.events_at(shape.address):
            raise InfeasibleSpec(
                "shape-without-singular-point",
                f"shape at {format_address(shape.address)} has no singular event",
            )


class _Builder:
    """Mutable tables used while the graph is lifted."""

    def __init__(self, spec: MapSpec):
        self.spec = spec
        self.atoms = []
        self.circles = []
        self.preimages = {}
        self.by_generation = {}
        self.addresses = {}
        self.components = UnionFind()

    def new_atom(self, generation, address, image, cover, singular=()) -> dict:
        atom = {
            "id": len(self.atoms),
            "generation": generation,
            "address": address,
            "internal": [],
            "external": [],
            "singular": list(singular),
            "image": image,
            "cover": cover,
        }
        self.atoms.append(atom)
        self.by_generation.setdefault(generation, []).append(atom["id"])
        self.addresses[address] = atom["id"]
        self.components[("atom", atom["id"])]
        return atom

    def new_circle(self, level, inner, outer, image, winding) -> dict:
        circle = {
            "id": len(self.circles),
            "level": level,
            "inner": inner,
            "outer": outer,
            "image": image,
            "winding": winding,
        }
        self.circles.append(circle)
        self.preimages.setdefault(image, []).append(circle["id"])
        return circle

    def build_base(self) -> None:
        windings = self.spec.trunk_windings
        base = self.new_atom(0, (), None, windings[0])
        inner = self.new_circle(1, base["id"], None, None, windings[0])
        outer = self.new_circle(0, None, base["id"], inner["id"], windings[0])
        base["internal"].append(inner["id"])
        base["external"].append(outer["id"])
        # auxiliary trunks meet the base level on frontier circles
        for winding in windings[1:]:
            self.new_circle(0, None, None, inner["id"], winding)

    def slots(self, beta: int) -> list:
        """Preimage circles of `beta`, created on demand at the attractor frontier."""
        circle = self.circles[beta]
        if circle["outer"] is None and beta not in self.preimages:
            for _ in range(self.spec.degree):
                self.new_circle(circle["level"] - 1, None, None, beta, 1)
        found = list(self.preimages.get(beta, []))
        total = sum(self.circles[c]["winding"] for c in found)
        if total != self.spec.degree:
            raise InfeasibleSpec(
                "degree-conservation",
                f"preimage windings of circle {beta} sum to {total}, not {self.spec.degree}",
            )
        return found

    def slot_key(self, circle_id: int) -> tuple:
        owner = self.circles[circle_id]["outer"]
        if owner is None:
            return ("slot", circle_id)
        return ("atom", owner)

    def attach(self, atom: dict, taken: list) -> None:
        keys = [self.components[self.slot_key(c)] for c in taken]
        if len(set(keys)) < len(keys):
            raise InfeasibleSpec(
                "planarity",
                f"no planar lift for atom {format_address(atom['address'])}: "
                "two of its internal circles bound the same molecule",
            )
        for circle_id in taken:
            self.components.union(("atom", atom["id"]), self.slot_key(circle_id))
            self.circles[circle_id]["inner"] = atom["id"]
            atom["internal"].append(circle_id)

    def add_external(self, atom: dict, image_circle: int, winding: int) -> None:
        circle = self.new_circle(atom["generation"], None, atom["id"], image_circle, winding)
        atom["external"].append(circle["id"])

    def lift(self, parent_id: int) -> None:
        """Builds every child of one atom."""
        parent = self.atoms[parent_id]
        free = {beta: deque(self.slots(beta)) for beta in parent["internal"]}
        index = 0
        while any(free.values()):
            address = parent["address"] + (index,)
            mults = self.spec.events_at(address)
            if mults:
                self.singular_child(parent, address, mults, free)
            else:
                self.regular_child(parent, address, free)
            index += 1

    def regular_child(self, parent: dict, address: tuple, free: dict) -> None:
        annular = len(parent["internal"]) == 1 and len(parent["external"]) == 1
        if annular:
            slot = free[parent["internal"][0]].popleft()
            cover = self.circles[slot]["winding"]
            child = self.new_atom(parent["generation"] - 1, address, parent["id"], cover)
            self.attach(child, [slot])
            self.add_external(child, parent["external"][0], cover)
            return
        taken = []
        for beta in parent["internal"]:
            if not free[beta]:
                raise InfeasibleSpec(
                    "degree-conservation",
                    f"preimages of circle {beta} run out before the others",
                )
            slot = free[beta].popleft()
            if self.circles[slot]["winding"] != 1:
                raise InfeasibleSpec(
                    "infinitely-many-singular-points",
                    f"atom {format_address(address)} must cover its non-annular image "
                    f"homeomorphically but circle {slot} winds "
                    f"{self.circles[slot]['winding']} times; the branching would repeat "
                    "on every backward generation",
                )
            taken.append(slot)
        child = self.new_atom(parent["generation"] - 1, address, parent["id"], 1)
        self.attach(child, taken)
        for epsilon in parent["external"]:
            self.add_external(child, epsilon, 1)

    def take_exact(self, queue: deque, cover: int) -> Optional[int]:
        """Number of leading slots of `queue` whose windings sum to `cover`."""
        total = 0
        for count, slot in enumerate(queue, start=1):
            total += self.circles[slot]["winding"]
            if total == cover:
                return count
            if total > cover:
                return None
        return None

    def lift_sizes(self, parent: dict, free: dict, cover: int) -> Optional[list]:
        sizes = []
        for beta in parent["internal"]:
            count = self.take_exact(free[beta], cover)
            if count is None:
                return None
            sizes.append(count)
        return sizes

    def singular_child(self, parent: dict, address: tuple, mults: list, free: dict) -> None:
        shape = self.spec.shape_at(address)
        defect = sum(m - 1 for m in mults)
        parent_euler = 2 - len(parent["internal"]) - len(parent["external"])
        annular = parent_euler == 0 and len(parent["internal"]) == 1
        sizes = None
        if annular and shape is not None and shape.cover is None:
            queue = free[parent["internal"][0]]
            if len(queue) < shape.internal:
                raise InfeasibleSpec(
                    "degree-conservation",
                    f"atom {format_address(address)} asks for {shape.internal} internal "
                    f"circles but only {len(queue)} preimage circles remain",
                )
            sizes = [shape.internal]
            cover = sum(self.circles[c]["winding"] for c in list(queue)[: shape.internal])
        elif shape is not None and shape.cover is not None:
            cover = shape.cover
            sizes = self.lift_sizes(parent, free, cover)
        elif annular:
            cover = self.circles[free[parent["internal"][0]][0]]["winding"]
            sizes = [1]
        else:
            for cover in range(max(mults), self.spec.degree + 1):
                sizes = self.lift_sizes(parent, free, cover)
                if sizes is not None:
                    external = 2 - (cover * parent_euler - defect) - sum(sizes)
                    if len(parent["external"]) <= external <= cover * len(parent["external"]):
                        break
                sizes = None
        if sizes is None:
            raise InfeasibleSpec(
                "degree-conservation",
                f"the preimage circles left for atom {format_address(address)} "
                "cannot be split evenly over its image",
            )
        if shape is not None and sum(sizes) != shape.internal:
            raise InfeasibleSpec(
                "degree-conservation",
                f"atom {format_address(address)} gets {sum(sizes)} internal circles, "
                f"shape asks for {shape.internal}",
            )
        if max(mults) > cover:
            raise InfeasibleSpec(
                "riemann-hurwitz",
                f"multiplicity {max(mults)} exceeds cover degree {cover} "
                f"at {format_address(address)}",
            )
        euler = cover * parent_euler - defect
        n_internal = sum(sizes)
        n_external = 2 - euler - n_internal
        if not len(parent["external"]) <= n_external <= cover * len(parent["external"]):
            raise InfeasibleSpec(
                "riemann-hurwitz",
                f"atom {format_address(address)} would need {n_external} external circles "
                f"over {len(parent['external'])} (cover degree {cover}, chi {euler})",
            )
        taken = []
        for beta, size in zip(parent["internal"], sizes):
            taken.extend(free[beta].popleft() for _ in range(size))
        child = self.new_atom(parent["generation"] - 1, address, parent["id"], cover, mults)
        self.attach(child, taken)
        counts = [1] * len(parent["external"])
        extra = n_external - len(counts)
        for j in range(len(counts)):
            step = min(extra, cover - 1)
            counts[j] += step
            extra -= step
        for epsilon, count in zip(parent["external"], counts):
            for winding in balanced_partition(cover, count):
                self.add_external(child, epsilon, winding)
        logger.debug(
            "singular atom %s: type (%d,%d), cover %d, multiplicities %s",
            format_address(address), n_internal, n_external, cover, mults,
        )

    def freeze(self, depth: int) -> AtomGraph:
        atoms = {
            a["id"]: Atom(
                id=a["id"],
                generation=a["generation"],
                internal=tuple(a["internal"]),
                external=tuple(a["external"]),
                singular=tuple(a["singular"]),
                image_atom=a["image"],
                cover_degree=a["cover"],
            )
            for a in self.atoms
        }
        circles = {
            c["id"]: Circle(
                id=c["id"],
                level=c["level"],
                inner_atom=c["inner"],
                outer_atom=c["outer"],
                image_circle=c["image"],
                winding=c["winding"],
            )
            for c in self.circles
        }
        chain = [0]
        address = (0,)
        while address in self.addresses:
            atom = self.atoms[self.addresses[address]]
            if atom["singular"] or len(atom["internal"]) != 1 or len(atom["external"]) != 1:
                break
            chain.append(atom["id"])
            address += (0,)
        return AtomGraph(
            degree=self.spec.degree,
            atoms=atoms,
            circles=circles,
            base_chain=tuple(chain),
            depth=depth,
            spec=self.spec,
        )


def generate(spec: MapSpec, depth: int) -> AtomGraph:
    """
    Materializes the atoms of a component down to `depth` generations beyond \
    the main stump (beyond the base annulus when there are no singular events).

    Args:
        spec (MapSpec): The map presentation.
        depth (int): Number of generations to build, at least 1.

    Returns:
        AtomGraph: The graph with roles assigned.

    Raises:
        InfeasibleSpec: The spec forces a forbidden pattern.
        AddressError: An event addresses an atom that is never built.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    check_spec(spec)
    stump = main_stump_depth(spec)
    deepest = max((len(e.atom_address) for e in spec.singular_events), default=0)
    bottom = -max(stump + depth, deepest)
    builder = _Builder(spec)
    builder.build_base()
    for generation in range(0, bottom, -1):
        for parent_id in list(builder.by_generation.get(generation, [])):
            builder.lift(parent_id)
        logger.debug(
            "generation %d: %d atoms", generation - 1, len(builder.by_generation.get(generation - 1, []))
        )
    wanted = {e.atom_address for e in spec.singular_events}
    missing = sorted(a for a in wanted if a not in builder.addresses)
    if missing:
        raise AddressError(
            "singular events address atoms that do not exist: "
            + ", ".join(format_address(a) for a in missing)
        )
    graph = builder.freeze(depth=-bottom)
    if not nx.is_connected(graph.gluing_graph()):
        raise InfeasibleSpec(
            "disconnected", "an auxiliary trunk never joins the main component"
        )
    try:
        graph = mark_main_auxiliary(graph)
    except RoleContradiction as error:
        raise InfeasibleSpec("main-atom-calculus", str(error)) from error
    logger.info(
        "generated %d atoms and %d circles down to generation %d",
        len(graph.atoms), len(graph.circles), bottom,
    )
    return graph


def atom_addresses(graph: AtomGraph) -> dict:
    """
    Preimage-tree address of every atom: children of an atom are indexed in \
    id order and the base annulus has the empty address.
    """
    addresses = {graph.base_chain[0]: ()}
    for atom in sorted(graph.atoms.values(), key=lambda a: (-a.generation, a.id)):
        if atom.id in addresses:
            for index, child in enumerate(graph.children(atom.id)):
                addresses[child.id] = addresses[atom.id] + (index,)
    return addresses
