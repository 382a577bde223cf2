"""
This module holds the `atlas` command line: generation and validation of \
atom graphs, Reeb trees and end classification, the numerical oracle and the \
cross-check between the two sides.

Exit codes: 0 ok, 1 validation failure or bad input, 2 infeasible spec, \
3 unclassifiable graph, 4 non-escaping orbit.
"""

import json
import logging
from functools import wraps
import click
import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from wander_atlas.core.config import get_config
from wander_atlas.core.errors import WanderAtlasError
from wander_atlas.core.logs import setup_logging
from wander_atlas.engine.decompose import decompose
from wander_atlas.engine.generate import generate
from wander_atlas.engine.roles import chain_check
from wander_atlas.engine.validate import validate
from wander_atlas.io.export import (
    atoms_frame,
    branching_frame,
    escape_frame,
    export_census_json,
    export_csv,
    export_svg,
    polylines_json,
    write_artifact,
)
from wander_atlas.io.graph_file import dumps_graph, read_graph, write_graph
from wander_atlas.io.spec_file import read_spec, spec_to_dict
from wander_atlas.oracle.contour import escape_time_grid, grid_nodes, level_components, make_grid, trace_levels
from wander_atlas.oracle.crosscheck import crosscheck
from wander_atlas.oracle.extract import extract_atom_graph
from wander_atlas.oracle.holo import (
    critical_levels,
    neutral_section,
    power_map,
    preimages,
    quadratic_map,
    tau,
)
from wander_atlas.reeb.ends import classify
from wander_atlas.reeb.tree import build_reeb, export_dot, reeb_summary
from wander_atlas.utils.extract import extract_complex, format_address

logger = logging.getLogger(__name__)
console = Console()
err_console = Console(stderr=True)


def exits(func):
    """Maps wander_atlas errors to their exit codes."""

    @wraps(func)
    def f_exits(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except WanderAtlasError as error:
            err_console.print(f"[red]{type(error).__name__}: {escape(str(error))}[/red]")
            raise SystemExit(error.exit_code) from error
        except ValueError as error:
            err_console.print(f"[red]{escape(str(error))}[/red]")
            raise SystemExit(1) from error

    return f_exits


def emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
@click.option("--threads", type=int, default=None, help="Worker thread cap.")
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of tables.")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def atlas(ctx, threads, as_json, verbose):
    """Pseudo-Boettcher components: atom graphs, ends and a numerical oracle."""
    config = get_config()
    setup_logging("DEBUG" if verbose else config["WANDER_ATLAS_LOG_LEVEL"])
    ctx.obj = {"threads": threads, "json": as_json}


@atlas.command("generate")
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--depth", type=int, default=4, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Graph JSON file.")
@click.option("--spec-out", type=click.Path(dir_okay=False), default=None, help="Normalized spec JSON.")
@click.pass_context
@exits
def generate_command(ctx, spec_file, depth, out, spec_out):
    """Materialize the atom graph of a spec file."""
    spec = read_spec(spec_file)
    graph = generate(spec, depth)
    if spec_out:
        write_artifact(spec_to_dict(spec), spec_out)
    if out:
        write_graph(graph, out)
    else:
        click.echo(dumps_graph(graph), nl=False)
        return
    if ctx.obj["json"]:
        emit({"atoms": len(graph.atoms), "circles": len(graph.circles), "depth": graph.depth})
        return
    table = Table(title=f"{len(graph.atoms)} atoms written to {out}")
    for column in ("generation", "atoms", "singular"):
        table.add_column(column, justify="right")
    for generation in range(0, graph.bottom_generation - 1, -1):
        row = graph.atoms_at(generation)
        table.add_row(str(generation), str(len(row)), str(sum(1 for a in row if a.singular)))
    console.print(table)


@atlas.command("validate")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@exits
def validate_command(ctx, graph_file):
    """Check every structural rule; exit 1 if any fails."""
    report = validate(read_graph(graph_file), threads=ctx.obj["threads"])
    if ctx.obj["json"]:
        emit(report.to_json())
    else:
        table = Table(title="validation")
        table.add_column("rule")
        table.add_column("status")
        table.add_column("offenders")
        table.add_column("detail")
        for result in report.results:
            status = "[green]pass[/green]" if result.passed else "[red]fail[/red]"
            table.add_row(result.rule, status, " ".join(map(str, result.offenders)), escape(result.detail))
        console.print(table)
    if not report.ok:
        raise SystemExit(1)


@atlas.command("classify")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Branching table CSV.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Census JSON file.")
@click.pass_context
@exits
def classify_command(ctx, graph_file, csv_path, out):
    """Classify the attractor-side and repeller-side ends."""
    end_space = classify(read_graph(graph_file), threads=ctx.obj["threads"])
    if csv_path:
        export_csv(branching_frame(end_space), csv_path)
    if out:
        write_artifact(export_census_json(end_space), out)
    if ctx.obj["json"]:
        emit(end_space.to_json())
        return
    console.print(
        f"{end_space.aib_class}/{end_space.rib_class} "
        f"(AIB: {end_space.aib_backing}, RIB: {end_space.rib_backing}, "
        f"certified depth {end_space.certified_depth})"
    )
    table = Table(title="branching")
    table.add_column("offset", justify="right")
    table.add_column("branches", justify="right")
    for offset, count in sorted(end_space.branching.items()):
        table.add_row(str(offset), str(count))
    console.print(table)
    ends = Table(title="repeller-side branches")
    ends.add_column("address")
    ends.add_column("atom", justify="right")
    ends.add_column("branches in", justify="right")
    for branch in end_space.rib:
        ends.add_row(format_address(branch.address), str(branch.atom), str(branch.branching_in))
    console.print(ends)


@atlas.command("reeb")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="DOT file.")
@click.pass_context
@exits
def reeb_command(ctx, graph_file, out):
    """Export the Reeb tree as DOT."""
    tree = build_reeb(read_graph(graph_file))
    if not out:
        click.echo(export_dot(tree), nl=False)
        return
    write_artifact(export_dot(tree), out)
    summary = reeb_summary(tree)
    if ctx.obj["json"]:
        emit(summary)
    else:
        console.print(", ".join(f"{k}: {v}" for k, v in summary.items()))


@atlas.command("decompose")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--atoms", "atoms_csv", type=click.Path(dir_okay=False), default=None, help="Atom table CSV.")
@click.pass_context
@exits
def decompose_command(ctx, graph_file, atoms_csv):
    """Print the trunk, stump and root decomposition."""
    graph = read_graph(graph_file)
    if atoms_csv:
        export_csv(atoms_frame(graph), atoms_csv)
    parts = decompose(graph)
    if ctx.obj["json"]:
        emit(parts.to_json())
        return
    console.print(f"main trunk: {list(parts.main_trunk)}")
    console.print(f"main stump: {parts.main_stump}")
    console.print(f"main root: {len(parts.main_root)} atoms")
    for trunk in parts.auxiliary_trunks:
        console.print(f"auxiliary trunk at circle {trunk.anchor}: {list(trunk.atoms)}")
    console.print(f"auxiliary root: {len(parts.auxiliary_root)} atoms")


@atlas.command("chain")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("atom_ids", type=int, nargs=-1, required=True)
@click.pass_context
@exits
def chain_command(ctx, graph_file, atom_ids):
    """Check a chain of atoms, repeller side first."""
    verdict = chain_check(read_graph(graph_file), atom_ids)
    payload = {
        "chain": list(verdict.chain),
        "mapped": list(verdict.mapped),
        "forward": verdict.forward,
        "propagated": verdict.propagated,
        "consistent": verdict.consistent,
    }
    if ctx.obj["json"]:
        emit(payload)
    else:
        console.print(", ".join(f"{k}: {v}" for k, v in payload.items()))


def map_options(func):
    """Shared --map, --d, --c-re and --c-im flags."""
    func = click.option("--c-im", type=float, default=0.0, show_default=True)(func)
    func = click.option("--c-re", type=float, default=1.0, show_default=True)(func)
    func = click.option("--d", "power", type=int, default=2, show_default=True, help="Degree of z^d.")(func)
    func = click.option(
        "--map", "kind", type=click.Choice(["z2", "z2c"]), default="z2", show_default=True
    )(func)
    return func


def make_map(kind: str, power: int, c_re: float, c_im: float):
    config = get_config()
    numeric = {
        "escape_radius": config["WANDER_ATLAS_ESCAPE_RADIUS"],
        "green_tol": config["WANDER_ATLAS_GREEN_TOL"],
        "max_iter": config["WANDER_ATLAS_MAX_ITER"],
    }
    if kind == "z2":
        return power_map(power, **numeric)
    return quadratic_map(complex(c_re, c_im), **numeric)


def parse_point(values: tuple) -> complex:
    """Either "RE IM" or a single complex literal such as 1+2j."""
    if len(values) == 2:
        return complex(float(values[0]), float(values[1]))
    point = extract_complex(values[0]) if len(values) == 1 else None
    if point is None:
        raise ValueError(f"cannot read a point from {' '.join(values)!r}")
    return point


@atlas.group("oracle")
def oracle():
    """Numerical evaluation on z^d and z^2 + c."""


@oracle.command("tau")
@map_options
@click.argument("point", nargs=-1, required=True)
@click.pass_context
@exits
def tau_command(ctx, kind, power, c_re, c_im, point):
    """tau at a point of the basin of infinity."""
    value = tau(make_map(kind, power, c_re, c_im), parse_point(point))
    if ctx.obj["json"]:
        emit(value)
    else:
        click.echo(f"{value:.6f}")


@oracle.command("preimages")
@map_options
@click.argument("point", nargs=-1, required=True)
@click.pass_context
@exits
def preimages_command(ctx, kind, power, c_re, c_im, point):
    """The d preimages of a point."""
    roots = preimages(make_map(kind, power, c_re, c_im), parse_point(point))
    if ctx.obj["json"]:
        emit([[r.real, r.imag] for r in roots])
    else:
        for root in roots:
            click.echo(f"{root.real:.12g} {root.imag:.12g}")


@oracle.command("neutral")
@map_options
@click.option("--n", "steps", type=int, default=3, show_default=True)
@click.argument("point", nargs=-1, required=True)
@click.pass_context
@exits
def neutral_command(ctx, kind, power, c_re, c_im, steps, point):
    """The neutral section f^-n(f^n(z)) and its largest angular gap."""
    section = neutral_section(make_map(kind, power, c_re, c_im), parse_point(point), steps)
    payload = {
        "count": len(section.points),
        "max_gap": section.max_gap,
        "tau": section.tau,
        "tau_spread": section.tau_spread,
        "points": [[p.real, p.imag] for p in section.points],
    }
    if ctx.obj["json"]:
        emit(payload)
    else:
        console.print(
            f"{payload['count']} points, max gap {section.max_gap:.6f}, tau spread {section.tau_spread:.2e}"
        )


@oracle.command("critical")
@map_options
@click.pass_context
@exits
def critical_command(ctx, kind, power, c_re, c_im):
    """tau levels of the critical orbit."""
    levels = critical_levels(make_map(kind, power, c_re, c_im))
    if ctx.obj["json"]:
        emit(levels)
    else:
        click.echo(" ".join(f"{t:.6f}" for t in levels))


@oracle.command("levels")
@map_options
@click.argument("level", type=float)
@click.option("--resolution", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Polyline JSON file.")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="SVG drawing.")
@click.pass_context
@exits
def levels_command(ctx, kind, power, c_re, c_im, level, resolution, out, svg):
    """Connected components of the level curve tau = LEVEL."""
    holo = make_map(kind, power, c_re, c_im)
    trace = trace_levels(holo, level, resolution=resolution, threads=ctx.obj["threads"])
    if out:
        write_artifact(polylines_json([trace]), out)
    if svg:
        export_svg([trace], svg, title=f"{holo.describe()}, tau = {level}")
    if ctx.obj["json"]:
        moduli = [np.abs(component) for component in level_components(trace)]
        emit(
            {
                "level": level,
                "count": trace.count,
                "components": [
                    {"points": len(m), "modulus": [float(m.min()), float(m.max())]} for m in moduli
                ],
            }
        )
    else:
        click.echo(trace.count)


@oracle.command("grid")
@map_options
@click.option("--resolution", type=int, default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="x, y, tau table.")
@click.pass_context
@exits
def grid_command(ctx, kind, power, c_re, c_im, resolution, csv_path):
    """tau sampled on the default window of the map."""
    holo = make_map(kind, power, c_re, c_im)
    grid = make_grid(holo, -1.0, 1.0, resolution)
    values = escape_time_grid(holo, grid, threads=ctx.obj["threads"])
    if csv_path:
        export_csv(escape_frame(*grid_nodes(grid), values), csv_path)
    escaping = np.isfinite(values)
    payload = {
        "nodes": int(values.size),
        "escaping": int(escaping.sum()),
        "tau_range": [float(values[escaping].min()), float(values[escaping].max())] if escaping.any() else None,
    }
    if ctx.obj["json"]:
        emit(payload)
    else:
        console.print(f"{payload['escaping']}/{payload['nodes']} nodes escape, tau range {payload['tau_range']}")


@oracle.command("extract")
@map_options
@click.option("--c", "base", type=float, default=None, help="Base constant.")
@click.option("--depth", type=int, default=4, show_default=True)
@click.option("--resolution", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Graph JSON file.")
@click.pass_context
@exits
def extract_command(ctx, kind, power, c_re, c_im, base, depth, resolution, out):
    """Numerical atom graph of a concrete map."""
    graph = extract_atom_graph(
        make_map(kind, power, c_re, c_im),
        c=base,
        depth=depth,
        resolution=resolution,
        threads=ctx.obj["threads"],
    )
    if out:
        write_graph(graph, out)
        console.print(f"{len(graph.atoms)} atoms written to {out}")
    else:
        click.echo(dumps_graph(graph), nl=False)


@atlas.command("crosscheck")
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@map_options
@click.option("--depth", type=int, default=4, show_default=True)
@click.option("--c", "base", type=float, default=None, help="Base constant.")
@click.option("--resolution", type=int, default=None)
@click.pass_context
@exits
def crosscheck_command(ctx, spec_file, kind, power, c_re, c_im, depth, base, resolution):
    """Compare a generated graph with the extraction from a concrete map; exit 0 iff isomorphic."""
    generated = generate(read_spec(spec_file), depth)
    extracted = extract_atom_graph(
        make_map(kind, power, c_re, c_im),
        c=base,
        depth=generated.depth,
        resolution=resolution,
        threads=ctx.obj["threads"],
    )
    same, detail = crosscheck(generated, extracted)
    if ctx.obj["json"]:
        emit({"isomorphic": same, "detail": detail, "atoms": [len(generated.atoms), len(extracted.atoms)]})
    else:
        colour = "green" if same else "red"
        console.print(f"[{colour}]{detail}[/{colour}] ({len(generated.atoms)} vs {len(extracted.atoms)} atoms)")
    if not same:
        raise SystemExit(1)
