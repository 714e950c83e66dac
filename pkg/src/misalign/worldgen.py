"""Seeded world construction.

A :class:`WorldSpec` describes how to build a world: population size, per-area
goal counts, and for each of conflicts / goals / weights either a preset table
or a uniform random draw from a range.

Randomness discipline
---------------------
All draws come from counter-based Philox streams addressed by
``(seed, derivation path)`` (:class:`RngStream`).  A stream's output depends
only on its address, never on what other streams have consumed, so worlds are
reproducible bit-for-bit on any platform and under any scheduling.  Within a
spec, path ``(0,)`` feeds conflict draws and path ``(1,)`` feeds agent draws:

* conflict stream: areas in index order; within an area, goal pairs
  ``(g, h)`` with ``g < h`` in row-major order, one uniform draw each;
* agent stream: one block of ``n`` goal draws per area (areas in index
  order, agents in index order within a block), then one ``n x m`` row-major
  block of weight draws.

Sweep harnesses derive one world seed per (series, point, run) address via
:meth:`RngStream.derived_seed`; the golden-value tests pin the streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Agent, ConflictMatrix, MisalignError, ProblemArea, Stance, World

# Child-stream indices under a world seed.
CONFLICT_STREAM = 0
AGENT_STREAM = 1

MAX_SEED = 2**64 - 1


class WorldSpecError(MisalignError):
    """A world spec is internally inconsistent; the message names the field."""


@dataclass(frozen=True)
class RngStream:
    """A deterministic random stream addressed by ``(seed, path)``."""

    seed: int
    path: tuple[int, ...] = ()

    def child(self, *steps: int) -> "RngStream":
        return RngStream(self.seed, self.path + steps)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(sequence))

    def derived_seed(self) -> int:
        """Collapse this address into a fresh 64-bit seed for a nested spec."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return int(sequence.generate_state(1, np.uint64)[0])


def _deep_tuple(value):
    if isinstance(value, (list, tuple)):
        return tuple(_deep_tuple(v) for v in value)
    return value


@dataclass(frozen=True)
class Randomize:
    """Which of the three ingredient tables are drawn rather than preset."""

    conflict: bool = True
    goals: bool = True
    weights: bool = True


@dataclass(frozen=True)
class Ranges:
    """Uniform draw ranges; a degenerate range like (1, 1) pins the value."""

    conflict: tuple[float, float] = (0.0, 1.0)
    weights: tuple[float, float] = (0.0, 1.0)


@dataclass(frozen=True)
class Presets:
    """Fixed tables used wherever the matching randomize flag is off.

    ``conflict[j]`` is a square matrix over area ``j``'s real goals (size
    ``k_j x k_j``, goal ``g`` at index ``g - 1``).  Either triangle may carry
    the values; the other may be left zero and is mirrored in.  ``goals`` and
    ``weights`` are ``n x m`` tables indexed by agent then area.
    """

    conflict: tuple | None = None
    goals: tuple | None = None
    weights: tuple | None = None

    def __post_init__(self) -> None:
        for name in ("conflict", "goals", "weights"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _deep_tuple(value))


@dataclass(frozen=True)
class WorldSpec:
    """A recipe for one world: sizes plus preset-or-random ingredients."""

    n_agents: int
    goals_per_area: tuple[int, ...]
    randomize: Randomize = field(default_factory=Randomize)
    ranges: Ranges = field(default_factory=Ranges)
    presets: Presets = field(default_factory=Presets)
    allow_null_goals: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "goals_per_area", tuple(int(k) for k in self.goals_per_area))

    @property
    def n_areas(self) -> int:
        return len(self.goals_per_area)


def _check_range(name: str, lo: float, hi: float) -> None:
    if not (0.0 <= lo <= hi <= 1.0):
        raise WorldSpecError(f"ranges.{name} must satisfy 0 <= min <= max <= 1, got ({lo}, {hi})")


def check_spec(spec: WorldSpec) -> None:
    """Raise :class:`WorldSpecError` naming the offending field, if any."""
    if spec.n_agents < 0:
        raise WorldSpecError(f"n_agents must be >= 0, got {spec.n_agents}")
    if spec.n_areas < 1:
        raise WorldSpecError("goals_per_area must name at least one area")
    for j, k in enumerate(spec.goals_per_area):
        if k < 1:
            raise WorldSpecError(f"goals_per_area[{j}] must be >= 1, got {k}")
    if not 0 <= spec.seed <= MAX_SEED:
        raise WorldSpecError(f"seed must be an unsigned 64-bit integer, got {spec.seed}")
    _check_range("conflict", *spec.ranges.conflict)
    _check_range("weights", *spec.ranges.weights)

    if not spec.randomize.conflict:
        tables = spec.presets.conflict
        if tables is None:
            raise WorldSpecError("presets.conflict is required when randomize.conflict is off")
        if len(tables) != spec.n_areas:
            raise WorldSpecError(
                f"presets.conflict must list {spec.n_areas} areas, got {len(tables)}"
            )
        for j, (table, k) in enumerate(zip(tables, spec.goals_per_area)):
            if len(table) != k or any(len(row) != k for row in table):
                raise WorldSpecError(f"presets.conflict[{j}] must be a {k}x{k} matrix")
    for name, flag in (("goals", spec.randomize.goals), ("weights", spec.randomize.weights)):
        if not flag:
            table = getattr(spec.presets, name)
            if table is None:
                raise WorldSpecError(f"presets.{name} is required when randomize.{name} is off")
            if len(table) != spec.n_agents:
                raise WorldSpecError(
                    f"presets.{name} must list {spec.n_agents} agents, got {len(table)}"
                )
            for i, row in enumerate(table):
                if len(row) != spec.n_areas:
                    raise WorldSpecError(
                        f"presets.{name}[{i}] must list {spec.n_areas} areas, got {len(row)}"
                    )


def _preset_pair_value(table, g: int, h: int, area: int) -> float:
    """Read the conflict of goals ``g < h`` from a preset matrix.

    Accepts the value in either triangle; a full matrix must agree with its
    own transpose wherever both triangles are non-zero.
    """
    upper = float(table[g - 1][h - 1])
    lower = float(table[h - 1][g - 1])
    if upper == lower:
        value = upper
    elif lower == 0.0:
        value = upper
    elif upper == 0.0:
        value = lower
    else:
        raise WorldSpecError(
            f"presets.conflict[{area}] is contradictory at goals ({g}, {h}): "
            f"{upper} vs {lower}"
        )
    if not 0.0 <= value <= 1.0:
        raise WorldSpecError(
            f"presets.conflict[{area}] value for goals ({g}, {h}) must lie in [0, 1], got {value}"
        )
    return value


def init_world(spec: WorldSpec) -> World:
    """Build a world from scratch: conflict matrices first, then agents."""
    check_spec(spec)
    rng = RngStream(spec.seed, (CONFLICT_STREAM,)).generator() if spec.randomize.conflict else None
    lo, hi = spec.ranges.conflict
    areas = []
    for j, k in enumerate(spec.goals_per_area):
        entries = np.zeros((k + 1, k + 1))
        table = None if rng is not None else spec.presets.conflict[j]
        if table is not None:
            for g in range(1, k + 1):
                if float(table[g - 1][g - 1]) != 0.0:
                    raise WorldSpecError(
                        f"presets.conflict[{j}] diagonal must be zero at goal {g}"
                    )
        for g in range(1, k + 1):
            for h in range(g + 1, k + 1):
                value = rng.uniform(lo, hi) if rng is not None else _preset_pair_value(table, g, h, j)
                entries[g, h] = entries[h, g] = value
        areas.append(ProblemArea(id=f"area_{j}", k=k, conflict=ConflictMatrix(k, entries)))
    return add_agents(World(problem_areas=tuple(areas), agents=()), spec)


def add_agents(world: World, spec: WorldSpec) -> World:
    """Append ``spec.n_agents`` agents with drawn or preset stances.

    The world's areas must already exist and match ``spec.goals_per_area``.
    New agents are appended in index order after any the world already holds.
    """
    check_spec(spec)
    if tuple(pa.k for pa in world.problem_areas) != spec.goals_per_area:
        raise WorldSpecError(
            "goals_per_area does not match the world's areas: "
            f"{spec.goals_per_area} vs {tuple(pa.k for pa in world.problem_areas)}"
        )
    n, m = spec.n_agents, spec.n_areas
    needs_rng = spec.randomize.goals or spec.randomize.weights
    rng = RngStream(spec.seed, (AGENT_STREAM,)).generator() if needs_rng else None

    goal_grid = np.empty((n, m), dtype=np.int64)
    for j, k in enumerate(spec.goals_per_area):
        if spec.randomize.goals:
            low = 0 if spec.allow_null_goals else 1
            goal_grid[:, j] = rng.integers(low, k + 1, size=n)
        else:
            for i in range(n):
                goal = int(spec.presets.goals[i][j])
                if not 0 <= goal <= k:
                    raise WorldSpecError(
                        f"presets.goals[{i}][{j}] must lie in 0..{k}, got {goal}"
                    )
                goal_grid[i, j] = goal

    if spec.randomize.weights:
        w_lo, w_hi = spec.ranges.weights
        weight_grid = rng.uniform(w_lo, w_hi, size=(n, m))
    else:
        weight_grid = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                weight = float(spec.presets.weights[i][j])
                if not 0.0 <= weight <= 1.0:
                    raise WorldSpecError(
                        f"presets.weights[{i}][{j}] must lie in [0, 1], got {weight}"
                    )
                weight_grid[i, j] = weight

    offset = len(world.agents)
    agents = list(world.agents)
    for i in range(n):
        stances = tuple(
            Stance(goal=int(goal_grid[i, j]), weight=float(weight_grid[i, j])) for j in range(m)
        )
        agents.append(Agent(id=f"agent_{offset + i}", kind="other", stances=stances))
    return World(problem_areas=world.problem_areas, agents=tuple(agents))


def constant_conflicts(goals_per_area: Sequence[int], values: Sequence[float]) -> tuple:
    """Preset tables giving every goal pair in area ``j`` the conflict ``values[j]``."""
    if len(values) != len(goals_per_area):
        raise WorldSpecError(
            f"need one conflict value per area: {len(goals_per_area)} areas, {len(values)} values"
        )
    tables = []
    for k, value in zip(goals_per_area, values):
        tables.append(
            tuple(
                tuple(0.0 if g == h else float(value) for h in range(k)) for g in range(k)
            )
        )
    return tuple(tables)
