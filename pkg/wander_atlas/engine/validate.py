"""
This module checks an AtomGraph against every combinatorial rule a component \
of strict wandering obeys. Failures are report entries, never exceptions.

The rules run on a thread pool; the report keeps the fixed rule order below \
whatever order the checks finish in.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Optional
import networkx as nx

from wander_atlas.core.config import thread_cap
from wander_atlas.core.model import AtomGraph, RuleResult, ValidationReport
from wander_atlas.engine.scan import infeasibility_scan
from wander_atlas.engine.transport import transport_violations

logger = logging.getLogger(__name__)


def check_euler_boundary(graph: AtomGraph) -> RuleResult:
    """Boundary circles exist, are distinct and point back at their atom."""
    offenders = []
    for atom in graph.atoms.values():
        circles = atom.internal + atom.external
        bad = (
            not circles
            or len(set(circles)) != len(circles)
            or any(c not in graph.circles for c in circles)
        )
        if not bad:
            bad = any(graph.circles[c].inner_atom != atom.id for c in atom.internal) or any(
                graph.circles[c].outer_atom != atom.id for c in atom.external
            )
        if bad:
            offenders.append(atom.id)
    for circle in graph.circles.values():
        if circle.inner_atom is not None and (
            circle.inner_atom not in graph.atoms
            or circle.id not in graph.atoms[circle.inner_atom].internal
        ):
            offenders.append(circle.inner_atom)
        if circle.outer_atom is not None and (
            circle.outer_atom not in graph.atoms
            or circle.id not in graph.atoms[circle.outer_atom].external
        ):
            offenders.append(circle.outer_atom)
    return RuleResult("euler-boundary", not offenders, tuple(sorted(set(offenders))))


def check_riemann_hurwitz(graph: AtomGraph) -> RuleResult:
    """chi(A) = k chi(f(A)) - sum(b_p - 1), with 2 <= b_p <= k."""
    offenders = []
    details = []
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        if any(m < 2 or m > atom.cover_degree for m in atom.singular):
            offenders.append(atom.id)
            details.append(f"atom {atom.id}: multiplicities {list(atom.singular)}")
            continue
        image = graph.atoms.get(atom.image_atom)
        if image is None:
            continue
        expected = atom.cover_degree * image.euler - atom.defect
        if atom.euler != expected:
            offenders.append(atom.id)
            details.append(
                f"atom {atom.id}: {atom.euler} != {atom.cover_degree}*{image.euler} - {atom.defect}"
            )
    return RuleResult("riemann-hurwitz", not offenders, tuple(offenders), "; ".join(details))


def check_gluing_acyclic(graph: AtomGraph) -> RuleResult:
    gluing = graph.gluing_graph()
    if nx.is_forest(gluing):
        return RuleResult("gluing-acyclic", True)
    cycle = nx.find_cycle(gluing)
    atoms = sorted({edge[0] for edge in cycle} | {edge[1] for edge in cycle})
    return RuleResult("gluing-acyclic", False, tuple(atoms), "the gluing graph has a cycle")


def check_single_shared_circle(graph: AtomGraph) -> RuleResult:
    shared = Counter(
        tuple(sorted((c.inner_atom, c.outer_atom)))
        for c in graph.circles.values()
        if not c.frontier
    )
    pairs = sorted(pair for pair, count in shared.items() if count > 1)
    offenders = tuple(atom for pair in pairs for atom in pair)
    return RuleResult(
        "single-shared-circle",
        not pairs,
        offenders,
        "; ".join(f"atoms {a} and {b} share {shared[(a, b)]} circles" for a, b in pairs),
    )


def check_degree_conservation(graph: AtomGraph) -> RuleResult:
    """
    Preimage windings of each glued circle sum to the degree, windings of an \
    atom over each circle of its image sum to its cover degree, and preimage \
    atoms of each non-bottom atom cover it with total degree equal to the degree.
    """
    offenders = []
    details = []
    preimage_windings = Counter()
    for circle in graph.circles.values():
        if circle.image_circle is not None:
            preimage_windings[circle.image_circle] += circle.winding
    for circle in sorted(graph.circles.values(), key=lambda c: c.id):
        if not circle.frontier and preimage_windings[circle.id] != graph.degree:
            offenders.append(circle.inner_atom)
            details.append(f"circle {circle.id}: preimage windings {preimage_windings[circle.id]}")
    bottom = graph.bottom_generation
    covers = Counter()
    for atom in graph.atoms.values():
        if atom.image_atom is not None:
            covers[atom.image_atom] += atom.cover_degree
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        if atom.generation > bottom and covers[atom.id] != graph.degree:
            offenders.append(atom.id)
            details.append(f"atom {atom.id}: preimage atoms cover {covers[atom.id]} times")
        image = graph.atoms.get(atom.image_atom)
        if image is None:
            continue
        over = Counter()
        for circle_id in atom.internal + atom.external:
            circle = graph.circles.get(circle_id)
            if circle is not None:
                over[circle.image_circle] += circle.winding
        targets = image.internal + image.external
        if set(over) - set(targets) or any(over[t] != atom.cover_degree for t in targets):
            offenders.append(atom.id)
            details.append(f"atom {atom.id}: windings over its image do not match cover degree")
    return RuleResult(
        "degree-conservation", not offenders, tuple(dict.fromkeys(offenders)), "; ".join(details)
    )


def check_generation_step(graph: AtomGraph) -> RuleResult:
    offenders = []
    for atom in sorted(graph.atoms.values(), key=lambda a: a.id):
        image = graph.atoms.get(atom.image_atom)
        if atom.image_atom is not None and image is None:
            offenders.append(atom.id)
        elif image is not None and image.generation != atom.generation + 1:
            offenders.append(atom.id)
    for circle in graph.circles.values():
        image = graph.circles.get(circle.image_circle)
        if image is not None and image.level != circle.level + 1:
            offenders.append(circle.inner_atom if circle.inner_atom is not None else circle.outer_atom)
        if circle.outer_atom in graph.atoms and graph.atoms[circle.outer_atom].generation != circle.level:
            offenders.append(circle.outer_atom)
        if circle.inner_atom in graph.atoms and graph.atoms[circle.inner_atom].generation != circle.level - 1:
            offenders.append(circle.inner_atom)
    return RuleResult("generation-step", not offenders, tuple(dict.fromkeys(offenders)))


def check_type_transport(graph: AtomGraph) -> RuleResult:
    violations = transport_violations(graph)
    return RuleResult(
        "type-transport",
        not violations,
        tuple(atom for atom, _, _ in violations),
        "; ".join(f"atom {a} -> {b}: {why}" for a, b, why in violations),
    )


def check_infeasible_pattern(graph: AtomGraph) -> RuleResult:
    findings = infeasibility_scan(graph)
    return RuleResult(
        "infeasible-pattern",
        not findings,
        tuple(atom for finding in findings for atom in finding.atoms),
        "; ".join(f"[{f.rule}] {f.detail}" for f in findings),
    )


RULES = (
    check_euler_boundary,
    check_riemann_hurwitz,
    check_gluing_acyclic,
    check_single_shared_circle,
    check_degree_conservation,
    check_generation_step,
    check_type_transport,
    check_infeasible_pattern,
)


def _run(rule, graph: AtomGraph) -> RuleResult:
    try:
        return rule(graph)
    except (KeyError, TypeError, ValueError, nx.NetworkXException) as error:
        name = rule.__name__.replace("check_", "").replace("_", "-")
        return RuleResult(name, False, (), f"could not be evaluated: {error!r}")


def validate(graph: AtomGraph, threads: Optional[int] = None) -> ValidationReport:
    """
    Runs every rule on `graph`.

    Args:
        graph (AtomGraph): Any parsed graph.
        threads (int, optional): Worker cap, defaults to the configured one.

    Returns:
        ValidationReport: One entry per rule, in fixed order.
    """
    workers = min(thread_cap(threads), len(RULES))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run, rule, graph) for rule in RULES]
        results = tuple(future.result() for future in futures)
    for result in results:
        if not result.passed:
            logger.info("rule %s failed for atoms %s", result.rule, list(result.offenders))
    return ValidationReport(results)
