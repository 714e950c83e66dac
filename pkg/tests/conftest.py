"""Shared builders and the independent brute-force scoring oracle."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from misalign import Agent, ConflictMatrix, ProblemArea, Stance, World


def brute_force_area(world: World, area: int, weighted: bool) -> float:
    """Literal double loop over ordered agent pairs; the reference route."""
    n = len(world.agents)
    total = 0.0
    for i1, a1 in enumerate(world.agents):
        for i2, a2 in enumerate(world.agents):
            if i1 == i2:
                continue
            s1, s2 = a1.stances[area], a2.stances[area]
            term = world.problem_areas[area].conflict.value(s1.goal, s2.goal)
            if weighted:
                w1 = 0.0 if s1.goal == 0 else s1.weight
                w2 = 0.0 if s2.goal == 0 else s2.weight
                term *= math.sqrt(w1 * w2)
            total += term
    return total / (n * (n - 1))


def mutex_world(goals, k: int, weights=None) -> World:
    """Single area, all distinct real goals fully conflicting."""
    goals = list(goals)
    weights = [1.0] * len(goals) if weights is None else list(weights)
    area = ProblemArea(id="area_0", k=k, conflict=ConflictMatrix.uniform(k, 1.0))
    agents = tuple(
        Agent(id=f"agent_{i}", kind="other", stances=(Stance(goal=g, weight=w),))
        for i, (g, w) in enumerate(zip(goals, weights))
    )
    return World(problem_areas=(area,), agents=agents)


@st.composite
def small_worlds(draw, max_agents: int = 8, max_areas: int = 3, max_goals: int = 4,
                 unit_weights: bool = False, allow_null: bool = True):
    """Random structurally valid worlds, kept small enough to brute force."""
    m = draw(st.integers(1, max_areas))
    ks = [draw(st.integers(1, max_goals)) for _ in range(m)]
    n = draw(st.integers(2, max_agents))
    unit = st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False)
    areas = []
    for j, k in enumerate(ks):
        entries = np.zeros((k + 1, k + 1))
        for g in range(1, k + 1):
            for h in range(g + 1, k + 1):
                entries[g, h] = entries[h, g] = draw(unit)
        areas.append(ProblemArea(id=f"area_{j}", k=k, conflict=ConflictMatrix(k, entries)))
    agents = []
    for i in range(n):
        stances = tuple(
            Stance(
                goal=draw(st.integers(0 if allow_null else 1, ks[j])),
                weight=1.0 if unit_weights else draw(unit),
            )
            for j in range(m)
        )
        agents.append(Agent(id=f"agent_{i}", kind="other", stances=stances))
    return World(problem_areas=tuple(areas), agents=tuple(agents))
