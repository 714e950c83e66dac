"""Core population model.

A :class:`World` holds a set of problem areas and a set of agents.  Within each
area an agent commits to at most one goal, expressed as a :class:`Stance`:
goal ``0`` is the reserved null goal ("no position"), goals ``1..k`` are the
area's real goals.  Pairwise goal conflict is recorded per area in a dense
:class:`ConflictMatrix` covering the null goal as row and column ``0``.

Everything here is immutable after construction.  Constructors are permissive
on purpose; :func:`validate_world` is the single authority on structural
invariants and reports violations instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

NULL_GOAL = 0

AGENT_KINDS = ("human", "ai", "other")

AgentKind = Literal["human", "ai", "other"]


class MisalignError(Exception):
    """Base class for errors raised by this package."""


class ScoringPreconditionError(MisalignError):
    """A scoring function was called on a world it cannot score."""


@dataclass(frozen=True, eq=False)
class ConflictMatrix:
    """Symmetric ``(k+1) x (k+1)`` matrix of pairwise goal conflict.

    ``entries[g][h]`` is the probability that goals ``g`` and ``h`` conflict.
    Index 0 is the null goal, which conflicts with nothing, so row 0, column 0
    and the diagonal are all zero in a valid matrix.
    """

    k: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def zeros(cls, k: int) -> "ConflictMatrix":
        return cls(k, np.zeros((k + 1, k + 1)))

    @classmethod
    def uniform(cls, k: int, value: float) -> "ConflictMatrix":
        """All distinct non-null goal pairs conflict with probability ``value``."""
        entries = np.full((k + 1, k + 1), float(value))
        entries[0, :] = 0.0
        entries[:, 0] = 0.0
        np.fill_diagonal(entries, 0.0)
        return cls(k, entries)

    @classmethod
    def from_lower(cls, k: int, rows: Sequence[Sequence[float]]) -> "ConflictMatrix":
        """Build from lower-triangular rows and mirror.

        ``rows[i]`` lists the conflicts of goal ``i + 2`` against goals
        ``1 .. i + 1``, so ``k`` goals need exactly ``k - 1`` rows.
        """
        if len(rows) != k - 1:
            raise ValueError(f"expected {k - 1} lower-triangular rows for k={k}, got {len(rows)}")
        entries = np.zeros((k + 1, k + 1))
        for i, row in enumerate(rows):
            g = i + 2
            if len(row) != g - 1:
                raise ValueError(f"row {i} should list {g - 1} conflicts, got {len(row)}")
            for h, value in enumerate(row, start=1):
                entries[g, h] = entries[h, g] = float(value)
        return cls(k, entries)

    def lower_rows(self) -> list[list[float]]:
        """Inverse of :meth:`from_lower` for a symmetric matrix."""
        return [[float(self.entries[g, h]) for h in range(1, g)] for g in range(2, self.k + 1)]

    def value(self, g: int, h: int) -> float:
        return float(self.entries[g, h])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConflictMatrix):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ProblemArea:
    """A decision domain with ``k`` real goals and their conflict structure."""

    id: str
    k: int
    conflict: ConflictMatrix
    goal_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.goal_labels is not None:
            object.__setattr__(self, "goal_labels", tuple(self.goal_labels))


@dataclass(frozen=True)
class Stance:
    """One agent's position in one problem area: a goal and how much it cares.

    A null-goal stance (``goal == 0``) carries no weight in any computation,
    whatever weight value is stored.
    """

    goal: int
    weight: float


@dataclass(frozen=True)
class Agent:
    """An actor holding one stance per problem area.

    ``kind`` ("human" / "ai" / "other") is descriptive metadata only; scoring
    never reads it.
    """

    id: str
    kind: str
    stances: tuple[Stance, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "stances", tuple(self.stances))


@dataclass(frozen=True)
class World:
    """A population of agents over a fixed list of problem areas."""

    problem_areas: tuple[ProblemArea, ...]
    agents: tuple[Agent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "problem_areas", tuple(self.problem_areas))
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_areas(self) -> int:
        return len(self.problem_areas)


@dataclass(frozen=True)
class MisalignmentReport:
    """Per-area misalignment scores plus their population-level mean."""

    per_area: tuple[float, ...]
    overall: float
    n_agents: int
    n_areas: int
    weighted: bool


# Violation categories, one per structural invariant.
AREA_GOAL_COUNT = "area_goal_count"
CONFLICT_SHAPE = "conflict_shape"
ASYMMETRIC_CONFLICT = "asymmetric_conflict"
NONZERO_DIAGONAL = "nonzero_diagonal"
NULL_GOAL_CONFLICT = "null_goal_conflict"
CONFLICT_OUT_OF_RANGE = "conflict_out_of_range"
STANCE_COUNT = "stance_count"
GOAL_OUT_OF_RANGE = "goal_out_of_range"
WEIGHT_OUT_OF_RANGE = "weight_out_of_range"
# Warning categories: scoring preconditions, not structural defects.
TOO_FEW_AGENTS = "too_few_agents"
GOALS_EXCEED_AGENTS = "goals_exceed_agents"


@dataclass(frozen=True)
class Violation:
    """One broken invariant, addressed by a field path into the world."""

    kind: str
    path: str
    message: str
    severity: Literal["error", "warning"] = "error"

    def __str__(self) -> str:
        return f"[{self.severity}] {self.path}: {self.message} ({self.kind})"


def validate_world(world: World) -> list[Violation]:
    """Check every structural invariant and return the violations found.

    A structurally valid world returns an empty list.  Conditions that only
    degrade scoring (fewer than two agents, an area with more goals than
    agents) are reported with severity "warning" rather than "error".
    """
    out: list[Violation] = []
    n = world.n_agents

    for j, pa in enumerate(world.problem_areas):
        base = f"problem_areas[{j}]"
        if pa.k < 1:
            out.append(Violation(AREA_GOAL_COUNT, f"{base}.k", f"k must be >= 1, got {pa.k}"))
            continue
        c = pa.conflict.entries
        if c.ndim != 2 or c.shape != (pa.k + 1, pa.k + 1):
            out.append(
                Violation(
                    CONFLICT_SHAPE,
                    f"{base}.conflict",
                    f"conflict matrix must be {(pa.k + 1, pa.k + 1)}, got {tuple(c.shape)}",
                )
            )
            continue  # cell checks would misfire on a misshapen matrix
        for g in range(pa.k + 1):
            if c[g, g] != 0.0:
                out.append(
                    Violation(
                        NONZERO_DIAGONAL,
                        f"{base}.conflict[{g}][{g}]",
                        f"a goal cannot conflict with itself, got {c[g, g]}",
                    )
                )
        for h in range(1, pa.k + 1):
            if c[0, h] != 0.0:
                out.append(
                    Violation(
                        NULL_GOAL_CONFLICT,
                        f"{base}.conflict[0][{h}]",
                        f"the null goal conflicts with nothing, got {c[0, h]}",
                    )
                )
        for g in range(pa.k + 1):
            for h in range(g + 1, pa.k + 1):
                if c[g, h] != c[h, g]:
                    out.append(
                        Violation(
                            ASYMMETRIC_CONFLICT,
                            f"{base}.conflict[{g}][{h}]",
                            f"conflict must be symmetric: [{g}][{h}]={c[g, h]} but [{h}][{g}]={c[h, g]}",
                        )
                    )
                elif not 0.0 <= c[g, h] <= 1.0:
                    # range reported once per symmetric pair, and only when the
                    # pair agrees, so a single mutation maps to a single finding
                    out.append(
                        Violation(
                            CONFLICT_OUT_OF_RANGE,
                            f"{base}.conflict[{g}][{h}]",
                            f"conflict must lie in [0, 1], got {c[g, h]}",
                        )
                    )

    m = world.n_areas
    for i, agent in enumerate(world.agents):
        base = f"agents[{i}]"
        if len(agent.stances) != m:
            out.append(
                Violation(
                    STANCE_COUNT,
                    f"{base}.stances",
                    f"agent must hold one stance per area ({m}), got {len(agent.stances)}",
                )
            )
            continue
        for j, stance in enumerate(agent.stances):
            k = world.problem_areas[j].k
            if not 0 <= stance.goal <= k:
                out.append(
                    Violation(
                        GOAL_OUT_OF_RANGE,
                        f"{base}.stances[{j}].goal",
                        f"goal must lie in 0..{k}, got {stance.goal}",
                    )
                )
            if not 0.0 <= stance.weight <= 1.0:
                out.append(
                    Violation(
                        WEIGHT_OUT_OF_RANGE,
                        f"{base}.stances[{j}].weight",
                        f"weight must lie in [0, 1], got {stance.weight}",
                    )
                )

    if n < 2:
        out.append(
            Violation(
                TOO_FEW_AGENTS,
                "agents",
                f"misalignment is defined over pairs of agents; got {n}",
                severity="warning",
            )
        )
    for j, pa in enumerate(world.problem_areas):
        if pa.k >= 1 and pa.k > n:
            out.append(
                Violation(
                    GOALS_EXCEED_AGENTS,
                    f"problem_areas[{j}].k",
                    f"area has more goals ({pa.k}) than there are agents ({n})",
                    severity="warning",
                )
            )
    return out


def goal_group(world: World, area: int, goal: int) -> set[int]:
    """Indices of the agents holding ``goal`` in ``area``.

    Over ``goal = 0..k`` the groups partition the population: every agent
    holds exactly one goal per area, possibly the null goal.
    """
    if not 0 <= area < world.n_areas:
        raise IndexError(f"area index {area} out of range for {world.n_areas} areas")
    k = world.problem_areas[area].k
    if not 0 <= goal <= k:
        raise ValueError(f"goal {goal} out of range 0..{k} for area {area}")
    return {i for i, agent in enumerate(world.agents) if agent.stances[area].goal == goal}
