"""Population sweeps.

Each experiment varies one knob of a generated (or deterministically
constructed) population, scores every sampled world with the weighted exact
scorer, and returns one :class:`ExperimentCurve` per series: mean and standard
deviation of the overall misalignment at each grid point.

Reproducibility contract: a sweep's output is a pure function of its
arguments.  Every (series, point, run) triple gets its own world seed derived
from the base seed (see :mod:`misalign.worldgen`), runs are reduced in run
order, and points may be computed on any number of threads without changing a
single byte of the result.  Mean and standard deviation use numpy's two-pass
reductions with the population convention (``ddof = 0``), so a single run
reports a standard deviation of exactly zero.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import numpy as np

from .model import Agent, ConflictMatrix, MisalignmentReport, ProblemArea, Stance, World
from .scoring import area_misalignment_mutex, overall_misalignment
from .worldgen import (
    Presets,
    Randomize,
    Ranges,
    RngStream,
    WorldSpec,
    constant_conflicts,
    init_world,
)

DEFAULT_AGENT_LADDER = (3, 6, 12, 24, 51, 102, 249, 501, 1002)
DEFAULT_PROPORTION_GRID = tuple(round(i * 0.05, 2) for i in range(21))
DEFAULT_WEIGHT_GRID = tuple(round(i * 0.1, 1) for i in range(11))
DEFAULT_RUNS = 100

EXPERIMENT_NAMES = (
    "problem-areas",
    "goals",
    "weight-sensitivity",
    "goal-distribution",
    "conflict-levels",
    "carla",
)

# Autonomous-driving template: per traffic rule, how much a vehicle-style and a
# pedestrian-style agent care about their (mutually conflicting) way of
# satisfying it.
CARLA_PROBLEM_AREAS = (
    ("no_pedestrian_collision", 0.50, 0.99),
    ("no_vehicle_collision", 0.40, 0.15),
    ("no_static_object_collision", 0.35, 0.15),
    ("no_red_light_violation", 0.30, 0.05),
    ("no_stop_sign_violation", 0.20, 0.05),
    ("no_route_blockage", 0.30, 0.05),
    ("keep_appropriate_speed", 0.30, 0.01),
    ("no_yield_violation", 0.30, 0.05),
)

CARLA_WEIGHT_MODES = ("table", "max")


@dataclass(frozen=True)
class CurvePoint:
    x: float
    mean: float
    std: float
    runs: int


@dataclass(frozen=True)
class ExperimentCurve:
    """One plotted line: an experiment name, its series parameters, its points."""

    experiment: str
    series_params: dict[str, Any]
    points: tuple[CurvePoint, ...]

    @property
    def series_label(self) -> str:
        return encode_series(self.series_params)


def _fmt_param(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def encode_series(params: dict[str, Any]) -> str:
    """Stable ``key=value;key=value`` encoding of series parameters."""
    parts = []
    for key in sorted(params):
        text = _fmt_param(params[key])
        if any(ch in f"{key}{text}" for ch in ",;=\n"):
            raise ValueError(f"series parameter {key}={text!r} would break the encoding")
        parts.append(f"{key}={text}")
    return ";".join(parts)


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        return os.cpu_count() or 1
    return max(1, threads)


def _round_half_away(x: float) -> int:
    """round() with halves away from zero, for non-negative x."""
    return int(math.floor(x + 0.5))


def _monte_carlo(
    experiment: str,
    series_params: Sequence[dict[str, Any]],
    xs: Sequence[float],
    runs: int,
    seed: int,
    make_world: Callable[[int, float, int], World],
    threads: int | None,
) -> list[ExperimentCurve]:
    """Run ``runs`` seeded worlds per (series, x) and reduce to mean/std."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not xs:
        raise ValueError("the sweep grid is empty")
    xs = tuple(xs)

    def point(job: tuple[int, int]) -> tuple[float, float]:
        s, p = job
        values = np.empty(runs)
        for r in range(runs):
            world_seed = RngStream(seed, (s, p, r)).derived_seed()
            world = make_world(s, xs[p], world_seed)
            values[r] = overall_misalignment(world, weighted=True).overall
        return float(np.mean(values)), float(np.std(values))

    jobs = [(s, p) for s in range(len(series_params)) for p in range(len(xs))]
    workers = _resolve_threads(threads)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, jobs))
    else:
        results = [point(job) for job in jobs]

    curves = []
    for s, params in enumerate(series_params):
        points = tuple(
            CurvePoint(x=xs[p], mean=results[s * len(xs) + p][0], std=results[s * len(xs) + p][1], runs=runs)
            for p in range(len(xs))
        )
        curves.append(ExperimentCurve(experiment=experiment, series_params=params, points=points))
    return curves


def _mutex_world_spec(
    n_agents: int, goals_per_area: tuple[int, ...], seed: int, weight_range: tuple[float, float]
) -> WorldSpec:
    """Spec where every real goal pair fully conflicts and goals are uniform."""
    return WorldSpec(
        n_agents=n_agents,
        goals_per_area=goals_per_area,
        randomize=Randomize(conflict=False, goals=True, weights=True),
        ranges=Ranges(weights=weight_range),
        presets=Presets(conflict=constant_conflicts(goals_per_area, (1.0,) * len(goals_per_area))),
        seed=seed,
    )


def exp_varying_problem_areas(
    agent_counts: Sequence[int] = DEFAULT_AGENT_LADDER,
    area_counts: Sequence[int] = (1, 2, 3, 4),
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
    threads: int | None = None,
) -> list[ExperimentCurve]:
    """Population size sweep, one curve per number of problem areas.

    Three fully conflicting goals per area, uniform random goal assignment,
    all weights 1.
    """
    xs = tuple(sorted(int(n) for n in agent_counts))
    series = [{"problem_areas": int(m), "seed": seed} for m in area_counts]
    shapes = [(3,) * int(m) for m in area_counts]

    def make_world(s: int, x: float, world_seed: int) -> World:
        return init_world(_mutex_world_spec(int(x), shapes[s], world_seed, (1.0, 1.0)))

    return _monte_carlo("problem-areas", series, xs, runs, seed, make_world, threads)


def exp_varying_goals(
    agent_counts: Sequence[int] = DEFAULT_AGENT_LADDER,
    goal_counts: Sequence[int] = (2, 3, 4, 5),
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
    threads: int | None = None,
) -> list[ExperimentCurve]:
    """Population size sweep, one curve per number of goals per area.

    Four problem areas, fully conflicting goals, uniform random assignment,
    all weights 1.
    """
    xs = tuple(sorted(int(n) for n in agent_counts))
    series = [{"goals": int(k), "seed": seed} for k in goal_counts]
    shapes = [(int(k),) * 4 for k in goal_counts]

    def make_world(s: int, x: float, world_seed: int) -> World:
        return init_world(_mutex_world_spec(int(x), shapes[s], world_seed, (1.0, 1.0)))

    return _monte_carlo("goals", series, xs, runs, seed, make_world, threads)


def _pin_goal_weight(world: World, area: int, goal: int, weight: float) -> World:
    """Set the stance weight of every agent holding ``goal`` in ``area``."""
    agents = []
    for agent in world.agents:
        stance = agent.stances[area]
        if stance.goal == goal:
            stances = list(agent.stances)
            stances[area] = replace(stance, weight=weight)
            agent = replace(agent, stances=tuple(stances))
        agents.append(agent)
    return World(problem_areas=world.problem_areas, agents=tuple(agents))


def exp_weight_sensitivity(
    weight_grid: Sequence[float] = DEFAULT_WEIGHT_GRID,
    area_counts: Sequence[int] = (1, 2, 3, 4),
    goal_counts: Sequence[int] = (2, 4),
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
    n_agents: int = 100,
    threads: int | None = None,
) -> list[ExperimentCurve]:
    """Sweep the stance weight of one goal's holders in the first area.

    One curve per (area count, goal count) pair.  Baseline population as in
    the size sweeps (full conflict, weights 1); agents holding goal 1 in the
    first area have that stance's weight pinned to the grid value.
    """
    xs = tuple(sorted(float(w) for w in weight_grid))
    combos = [(int(m), int(k)) for m in area_counts for k in goal_counts]
    series = [{"problem_areas": m, "goals": k, "seed": seed} for m, k in combos]
    shapes = [(k,) * m for m, k in combos]

    def make_world(s: int, x: float, world_seed: int) -> World:
        base = init_world(_mutex_world_spec(n_agents, shapes[s], world_seed, (1.0, 1.0)))
        return _pin_goal_weight(base, area=0, goal=1, weight=x)

    return _monte_carlo("weight-sensitivity", series, xs, runs, seed, make_world, threads)


def goal_distribution_counts(proportion: float, n_agents: int, k: int) -> list[int]:
    """Deterministic goal-group sizes for a first-goal share of ``proportion``.

    Goal 1 receives ``round(proportion * n)`` agents (halves away from zero);
    the remainder spreads over goals ``2..k`` as evenly as possible, leftovers
    going to the lowest-indexed goals.
    """
    if k < 2:
        raise ValueError(f"need at least 2 goals to distribute, got k={k}")
    if not 0.0 <= proportion <= 1.0:
        raise ValueError(f"proportion must lie in [0, 1], got {proportion}")
    first = _round_half_away(proportion * n_agents)
    base, leftover = divmod(n_agents - first, k - 1)
    return [first] + [base + (1 if g < leftover else 0) for g in range(k - 1)]


def exp_goal_distribution(
    proportion_grid: Sequence[float] = DEFAULT_PROPORTION_GRID,
    goal_counts: Sequence[int] = (2, 3, 4),
    n_agents: int = 1000,
) -> list[ExperimentCurve]:
    """Skew the share of agents on goal 1 in a single fully conflicting area.

    Deterministic: group sizes come from :func:`goal_distribution_counts` and
    each point is the closed-form score, so ``runs = 1`` and ``std = 0``.
    """
    xs = tuple(sorted(float(p) for p in proportion_grid))
    curves = []
    for k in goal_counts:
        points = tuple(
            CurvePoint(
                x=p,
                mean=area_misalignment_mutex(goal_distribution_counts(p, n_agents, int(k))).value,
                std=0.0,
                runs=1,
            )
            for p in xs
        )
        curves.append(
            ExperimentCurve(experiment="goal-distribution", series_params={"goals": int(k)}, points=points)
        )
    return curves


def exp_conflict_levels(
    goal_counts: Sequence[int] = (2, 3, 4, 5, 6),
    area_configs: Sequence[Sequence[float]] = ((1.0,), (0.5,), (0.0,), (0.2, 0.8), (0.5, 0.5)),
    n_agents: int = 120,
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
    threads: int | None = None,
) -> list[ExperimentCurve]:
    """Goal-count sweep under fixed conflict levels, one curve per config.

    Each config lists one conflict value per problem area, applied to every
    goal pair in that area.  Goals are uniform random; weights are drawn
    uniformly from [0.25, 0.75], so multi-area configs show how per-area
    levels average.
    """
    xs = tuple(sorted(int(k) for k in goal_counts))
    configs = [tuple(float(v) for v in config) for config in area_configs]
    series = [{"conflicts": "+".join(_fmt_param(v) for v in config), "seed": seed} for config in configs]

    def make_world(s: int, x: float, world_seed: int) -> World:
        config = configs[s]
        shape = (int(x),) * len(config)
        spec = WorldSpec(
            n_agents=n_agents,
            goals_per_area=shape,
            randomize=Randomize(conflict=False, goals=True, weights=True),
            ranges=Ranges(weights=(0.25, 0.75)),
            presets=Presets(conflict=constant_conflicts(shape, config)),
            seed=world_seed,
        )
        return init_world(spec)

    return _monte_carlo("conflict-levels", series, xs, runs, seed, make_world, threads)


def _carla_world(vehicle_count: int, n_agents: int, conflict: float, weight_mode: str) -> World:
    areas = tuple(
        ProblemArea(
            id=name,
            k=2,
            conflict=ConflictMatrix.uniform(2, conflict),
            goal_labels=("vehicle_style", "pedestrian_style"),
        )
        for name, _, _ in CARLA_PROBLEM_AREAS
    )
    agents = []
    for i in range(n_agents):
        vehicle = i < vehicle_count
        stances = tuple(
            Stance(
                goal=1 if vehicle else 2,
                weight=(w_vehicle if vehicle else w_pedestrian) if weight_mode == "table" else 1.0,
            )
            for _, w_vehicle, w_pedestrian in CARLA_PROBLEM_AREAS
        )
        agents.append(
            Agent(
                id=f"vehicle_{i}" if vehicle else f"pedestrian_{i}",
                kind="ai" if vehicle else "human",
                stances=stances,
            )
        )
    return World(problem_areas=areas, agents=tuple(agents))


def exp_carla(
    mix_grid: Sequence[float] = DEFAULT_PROPORTION_GRID,
    conflict_levels: Sequence[float] = (0.25, 0.5, 0.75, 1.0),
    weight_modes: Sequence[str] = CARLA_WEIGHT_MODES,
    n_agents: int = 1000,
) -> list[ExperimentCurve]:
    """Sweep the vehicle share of a mixed vehicle/pedestrian population.

    Eight traffic problem areas with two opposed goals each; vehicles all hold
    goal 1, pedestrians goal 2.  ``x`` is the vehicle fraction; the vehicle
    count is ``round(x * n)`` with halves away from zero.  Weights come from
    the template table or are all 1 ("max").  Deterministic, so ``runs = 1``.
    """
    xs = tuple(sorted(float(p) for p in mix_grid))
    for mode in weight_modes:
        if mode not in CARLA_WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {mode!r}, expected one of {CARLA_WEIGHT_MODES}")
    curves = []
    for level in conflict_levels:
        for mode in weight_modes:
            points = []
            for p in xs:
                world = _carla_world(_round_half_away(p * n_agents), n_agents, float(level), mode)
                score = overall_misalignment(world, weighted=True).overall
                points.append(CurvePoint(x=p, mean=score, std=0.0, runs=1))
            curves.append(
                ExperimentCurve(
                    experiment="carla",
                    series_params={"conflict": float(level), "weights": mode},
                    points=tuple(points),
                )
            )
    return curves


def evaluate_scenario(world: World) -> MisalignmentReport:
    """Score a scenario world the way the sweeps do: weighted, all areas."""
    return overall_misalignment(world, weighted=True)
