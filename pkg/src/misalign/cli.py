"""Command-line interface.

Exit codes: 0 on success, 1 when an input fails validation or scoring
preconditions, 2 for usage errors.  All numeric output is locale-independent.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import experiments as exp
from .model import MisalignError, MisalignmentReport, validate_world
from .scenario_io import (
    ScenarioError,
    ScenarioSemanticError,
    ScenarioDocument,
    format_number,
    parse_scenario,
    serialize_scenario,
    write_curves_csv,
)
from .scoring import asymptotic_bound, max_uniform_misalignment, overall_misalignment


class DataError(click.ClickException):
    """Input failed validation; exits with code 1."""

    exit_code = 1


def _int_list(_ctx, _param, value: str | None) -> tuple[int, ...] | None:
    if value is None:
        return None
    try:
        return tuple(int(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _float_list(_ctx, _param, value: str | None) -> tuple[float, ...] | None:
    if value is None:
        return None
    try:
        return tuple(float(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _config_list(_ctx, _param, value: str | None) -> tuple[tuple[float, ...], ...] | None:
    """Parse conflict configs like '1.0/0.5+0.5' into ((1.0,), (0.5, 0.5))."""
    if value is None:
        return None
    try:
        return tuple(
            tuple(float(part) for part in chunk.split("+")) for chunk in value.split("/")
        )
    except ValueError:
        raise click.BadParameter(f"expected configs like '1.0/0.2+0.8', got {value!r}")


def _load_scenario(path: Path, lenient: bool) -> ScenarioDocument:
    try:
        doc = parse_scenario(path.read_text(encoding="utf-8"), lenient=lenient)
    except ScenarioError as e:
        raise DataError(f"{path}: {e}")
    for warning in doc.warnings:
        click.echo(f"warning: {warning}", err=True)
    return doc


def _report_payload(report: MisalignmentReport) -> dict:
    return {
        "weighted": report.weighted,
        "agents": report.n_agents,
        "problem_areas": report.n_areas,
        "per_area": list(report.per_area),
        "overall": report.overall,
    }


@click.group()
def cli() -> None:
    """Quantify goal misalignment across mixed human/AI agent populations."""


@cli.command("eval")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Scenario JSON file (explicit world or generator spec).")
@click.option("--unweighted", is_flag=True, help="Ignore stance weights when scoring.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True, help="Output format.")
@click.option("--lenient", is_flag=True, help="Warn on unknown scenario fields instead of failing.")
def eval_cmd(scenario_path: Path, unweighted: bool, fmt: str, lenient: bool) -> None:
    """Score a scenario and print its misalignment report."""
    doc = _load_scenario(scenario_path, lenient)
    try:
        world = doc.materialize()
        report = overall_misalignment(world, weighted=not unweighted)
    except MisalignError as e:
        raise DataError(str(e))
    if fmt == "json":
        click.echo(json.dumps(_report_payload(report), indent=2, sort_keys=True))
    else:
        lines = ["area,score"]
        for j, score in enumerate(report.per_area):
            lines.append(f"{world.problem_areas[j].id},{format_number(score)}")
        lines.append(f"overall,{format_number(report.overall)}")
        click.echo("\n".join(lines))


@cli.command()
@click.option("--agents", "n", required=True, type=int, help="Population size n.")
@click.option("--goals", "k", required=True, type=int, help="Goals per area k.")
def bound(n: int, k: int) -> None:
    """Print the even-split misalignment bound and its large-n limit."""
    try:
        exact = max_uniform_misalignment(n, k)
        limit = asymptotic_bound(k)
    except ValueError as e:
        raise click.UsageError(str(e))
    click.echo(f"max_uniform_misalignment {format_number(exact)}")
    click.echo(f"asymptotic_bound {format_number(limit)}")


@cli.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Scenario JSON file to check.")
@click.option("--lenient", is_flag=True, help="Warn on unknown fields instead of failing.")
def validate(scenario_path: Path, lenient: bool) -> None:
    """Check a scenario against the format and the structural invariants."""
    try:
        doc = parse_scenario(scenario_path.read_text(encoding="utf-8"), lenient=lenient)
    except ScenarioSemanticError as e:
        for violation in e.violations:
            click.echo(str(violation))
        raise DataError(f"{scenario_path}: {len(e.violations)} violation(s)")
    except ScenarioError as e:
        raise DataError(f"{scenario_path}: {e}")
    for warning in doc.warnings:
        click.echo(f"warning: {warning}", err=True)
    if doc.world is not None:
        for violation in validate_world(doc.world):
            click.echo(str(violation))  # only warnings reach this point
    click.echo(f"{scenario_path}: ok")


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Scenario JSON file holding a generator spec.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Where to write the explicit world scenario.")
@click.option("--lenient", is_flag=True, help="Warn on unknown fields instead of failing.")
def generate(spec_path: Path, out_path: Path, lenient: bool) -> None:
    """Materialize a generator spec into an explicit world scenario."""
    doc = _load_scenario(spec_path, lenient)
    if doc.spec is None:
        raise DataError(f"{spec_path}: already an explicit world; nothing to generate")
    try:
        world = doc.materialize()
    except MisalignError as e:
        raise DataError(str(e))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(serialize_scenario(ScenarioDocument(world=world)), encoding="utf-8", newline="\n")
    click.echo(f"wrote {out_path} (seed={doc.spec.seed}, agents={world.n_agents})")


@cli.group()
def experiment() -> None:
    """Run a sweep and write <name>.csv into the output directory."""


def _threads_option(f):
    return click.option(
        "--threads",
        type=int,
        default=None,
        help="Worker threads (default: MISALIGN_THREADS or machine parallelism). Results are identical for any setting.",
    )(f)


def _mc_options(f):
    f = click.option("--seed", type=int, default=0, show_default=True, help="Base seed; every run's stream derives from it.")(f)
    f = click.option("--runs", type=click.IntRange(min=1), default=exp.DEFAULT_RUNS, show_default=True, help="Sampled worlds per grid point.")(f)
    f = _out_option(f)
    f = _threads_option(f)
    return f


def _out_option(f):
    return click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path), help="Output directory.")(f)


def _resolve_threads(threads: int | None) -> int | None:
    if threads is not None:
        return threads
    env = os.environ.get("MISALIGN_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise click.UsageError(f"MISALIGN_THREADS must be an integer, got {env!r}")
    return None


def _write_experiment(name: str, curves, out_dir: Path, detail: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.csv"
    path.write_text(write_curves_csv(curves), encoding="utf-8", newline="\n")
    click.echo(f"wrote {path} ({detail})")


@experiment.command("problem-areas")
@click.option("--agents", callback=_int_list, default=None, help="Comma-separated population sizes.")
@click.option("--areas", callback=_int_list, default=None, help="Comma-separated problem-area counts.")
@_mc_options
def experiment_problem_areas(agents, areas, seed, runs, out_dir, threads) -> None:
    """Misalignment vs population size, one curve per problem-area count."""
    threads = _resolve_threads(threads)
    curves = exp.exp_varying_problem_areas(
        agent_counts=agents or exp.DEFAULT_AGENT_LADDER,
        area_counts=areas or (1, 2, 3, 4),
        runs=runs,
        seed=seed,
        threads=threads,
    )
    _write_experiment("problem-areas", curves, out_dir, f"seed={seed}, runs={runs}")


@experiment.command("goals")
@click.option("--agents", callback=_int_list, default=None, help="Comma-separated population sizes.")
@click.option("--goals", "goals_", callback=_int_list, default=None, help="Comma-separated goal counts.")
@_mc_options
def experiment_goals(agents, goals_, seed, runs, out_dir, threads) -> None:
    """Misalignment vs population size, one curve per goals-per-area count."""
    threads = _resolve_threads(threads)
    curves = exp.exp_varying_goals(
        agent_counts=agents or exp.DEFAULT_AGENT_LADDER,
        goal_counts=goals_ or (2, 3, 4, 5),
        runs=runs,
        seed=seed,
        threads=threads,
    )
    _write_experiment("goals", curves, out_dir, f"seed={seed}, runs={runs}")


@experiment.command("weight-sensitivity")
@click.option("--weights", callback=_float_list, default=None, help="Comma-separated weight grid.")
@click.option("--areas", callback=_int_list, default=None, help="Comma-separated problem-area counts.")
@click.option("--goals", "goals_", callback=_int_list, default=None, help="Comma-separated goal counts.")
@click.option("--agents", type=int, default=100, show_default=True, help="Population size.")
@_mc_options
def experiment_weight_sensitivity(weights, areas, goals_, agents, seed, runs, out_dir, threads) -> None:
    """Misalignment vs the pinned weight of goal 1's holders in area 1."""
    threads = _resolve_threads(threads)
    curves = exp.exp_weight_sensitivity(
        weight_grid=weights or exp.DEFAULT_WEIGHT_GRID,
        area_counts=areas or (1, 2, 3, 4),
        goal_counts=goals_ or (2, 4),
        runs=runs,
        seed=seed,
        n_agents=agents,
        threads=threads,
    )
    _write_experiment("weight-sensitivity", curves, out_dir, f"seed={seed}, runs={runs}")


@experiment.command("goal-distribution")
@click.option("--proportions", callback=_float_list, default=None, help="Comma-separated goal-1 shares.")
@click.option("--goals", "goals_", callback=_int_list, default=None, help="Comma-separated goal counts (each >= 2).")
@click.option("--agents", type=int, default=1000, show_default=True, help="Population size.")
@click.option("--seed", type=int, default=0, show_default=True, help="Accepted for interface symmetry; the sweep is deterministic.")
@_out_option
def experiment_goal_distribution(proportions, goals_, agents, seed, out_dir) -> None:
    """Misalignment vs the share of agents holding goal 1 (deterministic)."""
    try:
        curves = exp.exp_goal_distribution(
            proportion_grid=proportions or exp.DEFAULT_PROPORTION_GRID,
            goal_counts=goals_ or (2, 3, 4),
            n_agents=agents,
        )
    except ValueError as e:
        raise click.UsageError(str(e))
    _write_experiment("goal-distribution", curves, out_dir, f"agents={agents}, deterministic")


@experiment.command("conflict-levels")
@click.option("--goals", "goals_", callback=_int_list, default=None, help="Comma-separated goal counts.")
@click.option("--configs", callback=_config_list, default=None, help="Per-area conflict configs, e.g. '1.0/0.5/0.2+0.8'.")
@click.option("--agents", type=int, default=120, show_default=True, help="Population size.")
@_mc_options
def experiment_conflict_levels(goals_, configs, agents, seed, runs, out_dir, threads) -> None:
    """Misalignment vs goals per area under fixed conflict levels."""
    threads = _resolve_threads(threads)
    curves = exp.exp_conflict_levels(
        goal_counts=goals_ or (2, 3, 4, 5, 6),
        area_configs=configs or ((1.0,), (0.5,), (0.0,), (0.2, 0.8), (0.5, 0.5)),
        n_agents=agents,
        runs=runs,
        seed=seed,
        threads=threads,
    )
    _write_experiment("conflict-levels", curves, out_dir, f"seed={seed}, runs={runs}")


@experiment.command("carla")
@click.option("--mix", callback=_float_list, default=None, help="Comma-separated vehicle fractions.")
@click.option("--conflicts", callback=_float_list, default=None, help="Comma-separated conflict levels.")
@click.option("--weights", "weight_modes", type=str, default="table,max", show_default=True, help="Comma-separated weight modes (table, max).")
@click.option("--agents", type=int, default=1000, show_default=True, help="Population size.")
@click.option("--seed", type=int, default=0, show_default=True, help="Accepted for interface symmetry; the sweep is deterministic.")
@_out_option
def experiment_carla(mix, conflicts, weight_modes, agents, seed, out_dir) -> None:
    """Misalignment vs vehicle share in a driving population (deterministic)."""
    modes = tuple(part.strip() for part in weight_modes.split(","))
    try:
        curves = exp.exp_carla(
            mix_grid=mix or exp.DEFAULT_PROPORTION_GRID,
            conflict_levels=conflicts or (0.25, 0.5, 0.75, 1.0),
            weight_modes=modes,
            n_agents=agents,
        )
    except ValueError as e:
        raise click.UsageError(str(e))
    _write_experiment("carla", curves, out_dir, f"agents={agents}, deterministic")


def run_cli(argv: list[str] | None = None) -> int:
    """Invoke the CLI programmatically and return its exit code."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="misalign", standalone_mode=False)
        return 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show(file=sys.stderr)
        return 2
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return e.exit_code
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(run_cli())
