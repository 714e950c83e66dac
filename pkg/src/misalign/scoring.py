"""Misalignment scoring.

The misalignment of a population in one problem area is the expected conflict
between a uniformly random *ordered* pair of distinct agents, so every sum
below is normalized by ``n * (n - 1)``.  The expectation is computed exactly
by enumerating the pair structure; nothing here samples.

Two routes exist on purpose.  :func:`area_misalignment` scores an arbitrary
world from its conflict matrix and stances.  :func:`area_misalignment_mutex`
is an independent closed form for the special case where all distinct real
goals conflict with certainty, driven only by how many agents hold each goal.
The two must agree whenever both apply, and the tests hold them to that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import NULL_GOAL, MisalignmentReport, ScoringPreconditionError, World


@dataclass(frozen=True)
class AreaScore:
    """A single area's misalignment and the route that produced it."""

    area: int
    value: float
    method: str


def _stance_arrays(world: World, area: int) -> tuple[np.ndarray, np.ndarray]:
    n = world.n_agents
    goals = np.fromiter((a.stances[area].goal for a in world.agents), dtype=np.int64, count=n)
    weights = np.fromiter((a.stances[area].weight for a in world.agents), dtype=np.float64, count=n)
    return goals, weights


def area_misalignment(world: World, area: int, weighted: bool = True) -> AreaScore:
    """Exact misalignment of the population within one problem area.

    Unweighted, the score is the mean conflict ``c(g1, g2)`` over all ordered
    pairs of distinct agents.  Weighted, each pair's conflict is scaled by the
    geometric mean ``sqrt(w1 * w2)`` of the two agents' stance weights, with
    no renormalization, so discounting weights can only lower the score.
    Null-goal stances conflict with nothing and contribute weight zero.

    The ordered-pair sum is factored through per-goal totals: with
    ``s[g] = sum of sqrt(w) over agents holding g`` (or the holder count when
    unweighted), the sum over all agent pairs equals ``s @ C @ s`` minus the
    self-pair terms.  That is algebraically identical to the double loop over
    agents, costs ``O(n + k^2)`` instead of ``O(n^2)``, and is deterministic
    for a given world regardless of how callers schedule area computations.
    """
    n = world.n_agents
    if n < 2:
        raise ScoringPreconditionError(f"misalignment needs at least 2 agents, got {n}")
    if not 0 <= area < world.n_areas:
        raise IndexError(f"area index {area} out of range for {world.n_areas} areas")
    pa = world.problem_areas[area]
    goals, weights = _stance_arrays(world, area)
    conflict = pa.conflict.entries
    if weighted:
        per_agent = np.sqrt(np.where(goals == NULL_GOAL, 0.0, weights))
        method = "exact_weighted"
    else:
        per_agent = np.ones(n)
        method = "exact_unweighted"
    totals = np.bincount(goals, weights=per_agent, minlength=pa.k + 1)
    paired = float(totals @ conflict @ totals)
    # drop the a1 == a2 terms; zero for any valid matrix (zero diagonal)
    paired -= float(np.sum(conflict[goals, goals] * per_agent * per_agent))
    return AreaScore(area=area, value=paired / (n * (n - 1)), method=method)


def area_misalignment_mutex(
    goal_counts: Sequence[int], null_count: int = 0, area: int = 0
) -> AreaScore:
    """Closed-form misalignment when all distinct real goals fully conflict.

    ``goal_counts[g]`` is the number of agents holding real goal ``g + 1``;
    ``null_count`` agents hold the null goal, conflicting with nobody while
    still being eligible for selection.  An ordered pair conflicts exactly
    when its agents hold different real goals, so the score is the fraction
    of ordered pairs that cross two distinct goal groups::

        sum over g != g' of count[g] * count[g']   /   n * (n - 1)

    The numerator is computed in exact integer arithmetic.
    """
    counts = [int(c) for c in goal_counts]
    if any(c < 0 for c in counts) or null_count < 0:
        raise ValueError("goal counts must be non-negative")
    n = sum(counts) + null_count
    if n < 2:
        raise ScoringPreconditionError(f"misalignment needs at least 2 agents, got {n}")
    held = sum(counts)
    cross_pairs = held * held - sum(c * c for c in counts)
    return AreaScore(area=area, value=cross_pairs / (n * (n - 1)), method="mutex_closed_form")


def overall_misalignment(world: World, weighted: bool = True) -> MisalignmentReport:
    """Score every problem area and average the results.

    The overall score is the plain arithmetic mean of the per-area scores, so
    areas where nothing conflicts dilute areas where much does.
    """
    m = world.n_areas
    if m < 1:
        raise ScoringPreconditionError("misalignment needs at least one problem area")
    per_area = tuple(area_misalignment(world, j, weighted=weighted).value for j in range(m))
    return MisalignmentReport(
        per_area=per_area,
        overall=sum(per_area) / m,
        n_agents=world.n_agents,
        n_areas=m,
        weighted=weighted,
    )


def max_uniform_misalignment(n: int, k: int) -> float:
    """Misalignment of ``n`` agents split evenly across ``k`` fully conflicting goals.

    The even split maximizes the mutually-exclusive score, giving
    ``n * (k - 1) / (k * (n - 1))``.  Defined only when ``k`` divides ``n``;
    the value decreases toward :func:`asymptotic_bound` as ``n`` grows, but
    never reaches it for finite ``n``.
    """
    if n < 2:
        raise ValueError(f"need at least 2 agents, got n={n}")
    if k < 1:
        raise ValueError(f"need at least 1 goal, got k={k}")
    if n % k != 0:
        raise ValueError(f"an even split requires k to divide n (n={n}, k={k})")
    return (n * (k - 1)) / (k * (n - 1))


def asymptotic_bound(k: int) -> float:
    """Large-population limit of the even-split misalignment: ``(k - 1) / k``."""
    if k < 1:
        raise ValueError(f"need at least 1 goal, got k={k}")
    return (k - 1) / k
